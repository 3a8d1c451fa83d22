//! Comparative statistics over experiment records.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

use crate::error::{Error, Result};
use crate::perturb::Method;
use crate::records::{ExperimentRecord, Metric};

/// `(fcom - dice) / dice` in percent.
pub fn relative_improvement(m_fcom: f64, m_dice: f64) -> Result<f64> {
    if m_dice == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok((m_fcom - m_dice) / m_dice * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
    pub count: usize,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        mean,
        median: median(values),
        sd,
        count: values.len(),
    })
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

/// Matched `(dice, fcom-dice)` metric values, in canonical cell order.
pub fn paired_values(records: &[ExperimentRecord], metric: Metric) -> Result<Vec<(ExperimentRecord, f64, f64)>> {
    let mut cells: BTreeMap<String, (Option<&ExperimentRecord>, Option<&ExperimentRecord>)> = BTreeMap::new();
    for r in records {
        let slot = cells.entry(r.pair_key()).or_default();
        let place = match r.method {
            Method::Dice => &mut slot.0,
            Method::FcomDice => &mut slot.1,
        };
        if place.is_some() {
            return Err(Error::UnpairedRows(format!("duplicate {} row for {}", r.method, r.pair_key())));
        }
        *place = Some(r);
    }
    let mut out = Vec::with_capacity(cells.len());
    for (key, cell) in cells {
        match cell {
            (Some(d), Some(f)) => out.push((d.clone(), metric.of(d), metric.of(f))),
            _ => return Err(Error::UnpairedRows(key)),
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementRow {
    pub mu: f64,
    pub sigma_c: f64,
    pub metric: Metric,
    /// `None` when every pair in the cell had a zero baseline.
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub sd: Option<f64>,
    pub count: usize,
    /// Pairs dropped because the DICE value was zero.
    pub zero_baseline: usize,
}

/// Relative improvement of FCom-DICE over DICE aggregated per `(mu, sigma_c)`
/// over budgets, realizations and targets.
pub fn mean_relative_improvement(records: &[ExperimentRecord], metric: Metric) -> Result<Vec<ImprovementRow>> {
    let mut groups: BTreeMap<(u64, u64), (Vec<f64>, usize)> = BTreeMap::new();
    for (r, dice, fcom) in paired_values(records, metric)? {
        // order-preserving key for non-negative floats
        let entry = groups.entry((r.mu.to_bits(), r.sigma_c.to_bits())).or_default();
        match relative_improvement(fcom, dice) {
            Ok(v) => entry.0.push(v),
            Err(_) => entry.1 += 1,
        }
    }
    let mut rows = Vec::new();
    for ((mu, sigma_c), (values, zero_baseline)) in groups {
        let s = summarize(&values).ok();
        rows.push(ImprovementRow {
            mu: f64::from_bits(mu),
            sigma_c: f64::from_bits(sigma_c),
            metric,
            mean: s.as_ref().map(|s| s.mean),
            median: s.as_ref().map(|s| s.median),
            sd: s.as_ref().map(|s| s.sd),
            count: values.len(),
            zero_baseline,
        });
    }
    rows.sort_by(|a, b| a.mu.total_cmp(&b.mu).then(a.sigma_c.total_cmp(&b.sigma_c)));
    Ok(rows)
}

/// Mean of successive finite differences `Δvalue / Δx`.
pub fn rate_of_change(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let mut total = 0.0;
    for w in series.windows(2) {
        let dx = w[1].0 - w[0].0;
        if dx <= 0.0 {
            return Err(Error::InvalidParam("series abscissae must increase strictly".into()));
        }
        total += (w[1].1 - w[0].1) / dx;
    }
    Ok(total / (series.len() - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JtResult {
    pub statistic: f64,
    /// Standardized statistic, positive when the data follow `direction`.
    pub z: f64,
    pub p_one_sided: f64,
}

fn upper_tail(z: f64) -> f64 {
    let normal = Normal::standard();
    normal.cdf(-z)
}

/// Jonckheere–Terpstra trend test over groups listed in ascending order of
/// the ordering variable, with the normal approximation.
pub fn jonckheere_terpstra(groups: &[Vec<f64>], direction: Direction) -> Result<JtResult> {
    if groups.len() < 2 || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::DegenerateGroups);
    }
    let mut statistic = 0.0;
    for (i, lower) in groups.iter().enumerate() {
        for upper in &groups[i + 1..] {
            for &x in lower {
                for &y in upper {
                    if x < y {
                        statistic += 1.0;
                    } else if x == y {
                        statistic += 0.5;
                    }
                }
            }
        }
    }
    let n: f64 = groups.iter().map(|g| g.len() as f64).sum();
    let sq: f64 = groups.iter().map(|g| (g.len() as f64).powi(2)).sum();
    let mean = (n * n - sq) / 4.0;
    let var = (n * n * (2.0 * n + 3.0)
        - groups
            .iter()
            .map(|g| {
                let m = g.len() as f64;
                m * m * (2.0 * m + 3.0)
            })
            .sum::<f64>())
        / 72.0;
    if var <= 0.0 {
        return Err(Error::DegenerateGroups);
    }
    let mut z = (statistic - mean) / var.sqrt();
    if direction == Direction::Decreasing {
        z = -z;
    }
    Ok(JtResult {
        statistic,
        z,
        p_one_sided: upper_tail(z),
    })
}

/// `Σz / √N`.
pub fn stouffer_combine(z_values: &[f64]) -> Result<f64> {
    if z_values.is_empty() {
        return Err(Error::Empty);
    }
    Ok(z_values.iter().sum::<f64>() / (z_values.len() as f64).sqrt())
}

pub fn stouffer_p(z: f64) -> f64 {
    upper_tail(z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub positive: usize,
    pub negative: usize,
    pub ties: usize,
    /// `P(X ≥ positive)` for `X ~ Bin(positive + negative, 1/2)`.
    pub p_one_sided: f64,
}

/// One-sided sign test for positive differences; zero differences are dropped.
pub fn sign_test(differences: &[f64]) -> Result<SignTest> {
    let positive = differences.iter().filter(|&&d| d > 0.0).count();
    let negative = differences.iter().filter(|&&d| d < 0.0).count();
    let ties = differences.len() - positive - negative;
    let trials = (positive + negative) as u64;
    if trials == 0 {
        return Err(Error::Empty);
    }
    let binom = Binomial::new(0.5, trials).map_err(|e| Error::InvalidParam(e.to_string()))?;
    let p = if positive == 0 { 1.0 } else { binom.sf(positive as u64 - 1) };
    Ok(SignTest {
        positive,
        negative,
        ties,
        p_one_sided: p,
    })
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateGroups);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendCell {
    pub method: Method,
    pub mu: f64,
    pub s_min: usize,
    pub p: f64,
    pub beta_b: f64,
    pub groups: usize,
    pub z: f64,
    pub p_one_sided: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSummary {
    pub metric: Metric,
    pub hypothesis: String,
    pub cells: Vec<TrendCell>,
    /// Cells skipped because fewer than two σ_c groups or zero variance.
    pub skipped: usize,
    pub combined_z: Option<f64>,
    pub combined_p: Option<f64>,
}

/// JT test for "smaller σ_c gives a larger metric" in every
/// `(method, μ, s_min, p, β_b)` cell, combined with Stouffer's method.
pub fn sigma_trend(records: &[ExperimentRecord], metric: Metric) -> TrendSummary {
    type CellKey = (&'static str, u64, usize, u64, u64);
    let mut cells: BTreeMap<CellKey, BTreeMap<u64, Vec<f64>>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.method.as_str(), r.mu.to_bits(), r.s_min, r.p.to_bits(), r.beta_b.to_bits()))
            .or_default()
            .entry(r.sigma_c.to_bits())
            .or_default()
            .push(metric.of(r));
    }
    let mut out = Vec::new();
    let mut skipped = 0;
    for ((method, mu, s_min, p, beta_b), by_sigma) in cells {
        let mut keyed: Vec<(f64, Vec<f64>)> = by_sigma.into_iter().map(|(s, v)| (f64::from_bits(s), v)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let groups: Vec<Vec<f64>> = keyed.into_iter().map(|(_, v)| v).collect();
        match jonckheere_terpstra(&groups, Direction::Decreasing) {
            Ok(jt) if jt.z.is_finite() => out.push(TrendCell {
                method: method.parse().expect("method names round-trip"),
                mu: f64::from_bits(mu),
                s_min,
                p: f64::from_bits(p),
                beta_b: f64::from_bits(beta_b),
                groups: groups.len(),
                z: jt.z,
                p_one_sided: jt.p_one_sided,
            }),
            _ => skipped += 1,
        }
    }
    let zs: Vec<f64> = out.iter().map(|c| c.z).collect();
    let combined_z = stouffer_combine(&zs).ok();
    TrendSummary {
        metric,
        hypothesis: format!("{} decreases as sigma_c increases", metric.as_str()),
        combined_p: combined_z.map(stouffer_p),
        cells: out,
        skipped,
        combined_z,
    }
}

#[derive(Serialize)]
struct DescriptorRow<'a> {
    dataset: &'a str,
    mu: f64,
    sigma_c: f64,
    s_min: usize,
    beta_b: f64,
    p: f64,
    method: Method,
    realization: usize,
    target: usize,
    avg_centroid_sq_distance: f64,
    community_size: usize,
    inter_intra_ratio: Option<f64>,
    mean_degree: f64,
    community_degree: usize,
    mean_betweenness: f64,
    community_betweenness: f64,
    mean_closeness: f64,
    community_closeness: f64,
    m1: f64,
    m2: f64,
}

/// Descriptor table for external model fitting. Undefined ratios are empty
/// cells.
pub fn export_descriptors<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(DescriptorRow {
            dataset: &r.dataset,
            mu: r.mu,
            sigma_c: r.sigma_c,
            s_min: r.s_min,
            beta_b: r.beta_b,
            p: r.p,
            method: r.method,
            realization: r.realization,
            target: r.target,
            avg_centroid_sq_distance: r.avg_centroid_sq_distance,
            community_size: r.community_size,
            inter_intra_ratio: r.inter_intra_ratio.filter(|v| v.is_finite()),
            mean_degree: r.mean_degree,
            community_degree: r.community_degree,
            mean_betweenness: r.mean_betweenness,
            community_betweenness: r.community_betweenness,
            mean_closeness: r.mean_closeness,
            community_closeness: r.community_closeness,
            m1: r.m1,
            m2: r.m2,
        })?;
    }
    w.flush().map_err(|e| Error::InvalidParam(format!("descriptor export: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn improvement_examples() {
        assert_eq!(relative_improvement(0.2, 0.2).unwrap(), 0.0);
        assert_abs_diff_eq!(relative_improvement(0.3, 0.2).unwrap(), 50.0, epsilon = 1e-12);
        assert!(matches!(relative_improvement(0.3, 0.0), Err(Error::ZeroBaseline)));
    }

    #[test]
    fn rate_examples() {
        assert_eq!(rate_of_change(&[(0.0, 2.0), (0.5, 2.0), (1.0, 2.0)]).unwrap(), 0.0);
        let linear: Vec<(f64, f64)> = [0.01, 0.2, 0.4, 1.0].iter().map(|&b| (b, 3.0 * b + 1.0)).collect();
        assert_abs_diff_eq!(rate_of_change(&linear).unwrap(), 3.0, epsilon = 1e-12);
        assert!(matches!(rate_of_change(&[(0.0, 1.0)]), Err(Error::TooFewPoints)));
    }

    #[test]
    fn jt_small_groups() {
        let groups = vec![vec![1.0, 2.0], vec![2.0, 3.0], vec![4.0]];
        // pairs (g0,g1): 1<2,1<3,2=2 half,2<3 -> 3.5; (g0,g2): 2; (g1,g2): 2
        let jt = jonckheere_terpstra(&groups, Direction::Increasing).unwrap();
        assert_eq!(jt.statistic, 7.5);
        let reversed: Vec<Vec<f64>> = groups.iter().rev().cloned().collect();
        let flipped = jonckheere_terpstra(&reversed, Direction::Decreasing).unwrap();
        assert_abs_diff_eq!(jt.p_one_sided, flipped.p_one_sided, epsilon = 1e-12);
        assert!(matches!(
            jonckheere_terpstra(&[vec![1.0], vec![]], Direction::Increasing),
            Err(Error::DegenerateGroups)
        ));
    }

    #[test]
    fn jt_strong_trend() {
        let groups: Vec<Vec<f64>> = (0..4).map(|g| (0..20).map(|i| g as f64 * 100.0 + i as f64).collect()).collect();
        assert!(jonckheere_terpstra(&groups, Direction::Increasing).unwrap().p_one_sided < 1e-3);
    }

    #[test]
    fn stouffer_examples() {
        assert_eq!(stouffer_combine(&[1.7]).unwrap(), 1.7);
        assert_abs_diff_eq!(stouffer_combine(&[2.0; 4]).unwrap(), 4.0, epsilon = 1e-12);
        assert!(matches!(stouffer_combine(&[]), Err(Error::Empty)));
    }

    #[test]
    fn sign_and_spearman() {
        let t = sign_test(&[1.0, 2.0, 0.0, -1.0, 3.0]).unwrap();
        assert_eq!((t.positive, t.negative, t.ties), (3, 1, 1));
        assert_abs_diff_eq!(t.p_one_sided, 5.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 25.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[10.0, 30.0]), 20.0);
    }
}
