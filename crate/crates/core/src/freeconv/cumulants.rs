//! Moment sequences, free cumulant sequences, and the non-crossing
//! moment–cumulant correspondence.
//!
//! The transforms use the triangular recursion
//! `m_n = sum_{s=1}^{n} κ_s · [x^{n-s}] M(x)^s` with `M(x) = sum m_j x^j`,
//! `m_0 = 1`, which is the generating-function form of summing over
//! non-crossing partitions.

use crate::error::{Error, Result};

/// Default truncation order for cumulant checks.
pub const DEFAULT_ORDER: usize = 24;

/// Raw moments `m_1, ..., m_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeq {
    values: Vec<f64>,
}

/// Free cumulants `κ_1, ..., κ_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeCumulantSeq {
    values: Vec<f64>,
}

impl MomentSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("moment sequence must have order >= 1".to_string()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invariant("moments must be finite".to_string()));
        }
        Ok(MomentSeq { values })
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `m_j`, 1-indexed.
    pub fn get(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.values.len());
        self.values[j - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Moment-problem validity: the Hankel matrices `[m_{i+j}]_{0..r}` built
    /// from `(1, m_1, ..., m_{2r})` must be positive semidefinite. The
    /// tolerance is relative to the matrix scale since high moments grow
    /// geometrically with the support radius.
    pub fn hankel_psd(&self, rel_tol: f64) -> Result<()> {
        let max_r = self.values.len() / 2;
        for r in 1..=max_r {
            let dim = r + 1;
            let mut h = nalgebra::DMatrix::<f64>::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    let idx = i + j;
                    h[(i, j)] = if idx == 0 { 1.0 } else { self.values[idx - 1] };
                }
            }
            let scale = h.iter().fold(1.0f64, |acc, &v| acc.max(v.abs()));
            let eig = h.symmetric_eigen();
            let min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            if min < -rel_tol * scale {
                return Err(Error::invariant(format!(
                    "Hankel matrix of order {r} has eigenvalue {min:.3e} (scale {scale:.3e})"
                )));
            }
        }
        Ok(())
    }
}

impl FreeCumulantSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("cumulant sequence must have order >= 1".to_string()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invariant("cumulants must be finite".to_string()));
        }
        Ok(FreeCumulantSeq { values })
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `κ_m`, 1-indexed.
    pub fn get(&self, m: usize) -> f64 {
        assert!(m >= 1 && m <= self.values.len());
        self.values[m - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Coefficient `[x^k] (P(x) * M(x))` truncated at degree `deg`, where `m`
/// holds `m_0..m_deg`.
fn poly_mul_trunc(p: &[f64], m: &[f64], deg: usize) -> Vec<f64> {
    let mut out = vec![0.0; deg + 1];
    for (i, &pi) in p.iter().enumerate().take(deg + 1) {
        if pi == 0.0 {
            continue;
        }
        for (j, &mj) in m.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += pi * mj;
        }
    }
    out
}

/// Free cumulants from moments via the triangular recursion.
pub fn moments_to_cumulants(m: &MomentSeq) -> FreeCumulantSeq {
    let order = m.order();
    // m0[j] = m_j with m_0 = 1
    let mut m0 = vec![1.0];
    m0.extend_from_slice(m.values());
    let mut kappa = vec![0.0; order + 1]; // kappa[s] = κ_s, kappa[0] unused
    for n in 1..=order {
        let mut pow = vec![0.0; n + 1];
        pow[0] = 1.0; // M(x)^0
        let mut correction = 0.0;
        for s in 1..n {
            pow = poly_mul_trunc(&pow, &m0, n);
            correction += kappa[s] * pow[n - s];
        }
        kappa[n] = m0[n] - correction;
    }
    FreeCumulantSeq { values: kappa[1..].to_vec() }
}

/// Moments from free cumulants (inverse of [`moments_to_cumulants`]).
pub fn cumulants_to_moments(k: &FreeCumulantSeq) -> MomentSeq {
    let order = k.order();
    let mut m0 = vec![0.0; order + 1];
    m0[0] = 1.0;
    for n in 1..=order {
        let mut pow = vec![0.0; n + 1];
        pow[0] = 1.0;
        let mut total = 0.0;
        for s in 1..=n {
            pow = poly_mul_trunc(&pow, &m0, n);
            total += k.get(s) * pow[n - s];
        }
        m0[n] = total;
    }
    MomentSeq { values: m0[1..].to_vec() }
}

/// All non-crossing partitions of `{0, ..., n-1}` as sorted blocks.
///
/// The block containing the first element splits the rest into independent
/// gaps, which gives the usual Catalan recursion. Intended for short words
/// (mixed-moment evaluation), not for bulk enumeration.
pub fn non_crossing_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(elems: &[usize]) -> Vec<Vec<Vec<usize>>> {
        if elems.is_empty() {
            return vec![vec![]];
        }
        let first = elems[0];
        let rest = &elems[1..];
        let mut out = Vec::new();
        // choose the members of the block containing `first` among `rest`,
        // keeping them in order; the gaps between consecutive members must
        // be partitioned without crossing the block, i.e. independently.
        let k = rest.len();
        // iterate over subsets of rest indices in increasing order via bitmask
        // only for small n; for n > 16 this is not meant to be used.
        assert!(k <= 16, "non-crossing enumeration limited to short words");
        for mask in 0..(1u32 << k) {
            let chosen: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            let mut block = vec![first];
            block.extend(chosen.iter().map(|&i| rest[i]));
            // gaps: runs of `rest` strictly between consecutive block members;
            // a non-crossing partition must close each gap within itself
            let mut gaps: Vec<&[usize]> = Vec::new();
            let mut prev = 0usize;
            for &c in &chosen {
                gaps.push(&rest[prev..c]);
                prev = c + 1;
            }
            gaps.push(&rest[prev..]);
            // cartesian product of the independent gap partitions
            let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
            for gap in gaps {
                let sub = go(gap);
                let mut next = Vec::with_capacity(partial.len() * sub.len());
                for p in &partial {
                    for s in &sub {
                        let mut q = p.clone();
                        q.extend(s.iter().cloned());
                        next.push(q);
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
        out
    }
    go(&(0..n).collect::<Vec<_>>())
}

/// Mixed moment `E[a_{w_1} a_{w_2} ... a_{w_n}]` of freely independent
/// variables, from their cumulant sequences: the sum over non-crossing
/// partitions with monochromatic blocks of the block cumulants.
///
/// `word[i]` indexes into `cumulants`; `cumulants[v][m-1]` is `κ_m` of
/// variable `v`.
pub fn mixed_moment(word: &[usize], cumulants: &[&[f64]]) -> f64 {
    if word.is_empty() {
        return 1.0;
    }
    let mut total = 0.0;
    'outer: for partition in non_crossing_partitions(word.len()) {
        let mut product = 1.0;
        for block in &partition {
            let color = word[block[0]];
            if block.iter().any(|&i| word[i] != color) {
                continue 'outer; // mixed cumulants of free variables vanish
            }
            let size = block.len();
            if size > cumulants[color].len() {
                continue 'outer;
            }
            product *= cumulants[color][size - 1];
        }
        total += product;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn point_mass_cumulants() {
        // δ_a: m_j = a^j, κ_1 = a, κ_m = 0 for m >= 2
        let a = 1.7f64;
        let m = MomentSeq::new((1..=10).map(|j| a.powi(j)).collect()).unwrap();
        let k = moments_to_cumulants(&m);
        assert_abs_diff_eq!(k.get(1), a, epsilon = 1e-12);
        for j in 2..=10 {
            assert_abs_diff_eq!(k.get(j), 0.0, epsilon = 1e-9);
        }
        let back = cumulants_to_moments(&k);
        for j in 1..=10 {
            assert_abs_diff_eq!(back.get(j), m.get(j), epsilon = 1e-9);
        }
    }

    #[test]
    fn semicircle_cumulants() {
        // standard semicircle: moments 0,1,0,2,0,5,0,14 -> κ_2 = 1 only
        let m = MomentSeq::new(vec![0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0]).unwrap();
        let k = moments_to_cumulants(&m);
        for j in 1..=8 {
            let want = if j == 2 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(k.get(j), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_cumulants_give_free_poisson_moments() {
        // κ_m = λ for all m: m_1 = λ, m_2 = λ + λ^2, m_3 = λ + 3λ^2 + λ^3
        for lambda in [0.5, 1.0, 2.0] {
            let k = FreeCumulantSeq::new(vec![lambda; 6]).unwrap();
            let m = cumulants_to_moments(&k);
            assert_abs_diff_eq!(m.get(1), lambda, epsilon = 1e-12);
            assert_abs_diff_eq!(m.get(2), lambda + lambda * lambda, epsilon = 1e-12);
            assert_abs_diff_eq!(
                m.get(3),
                lambda + 3.0 * lambda * lambda + lambda.powi(3),
                epsilon = 1e-12
            );
        }
        // λ = 1 gives the Catalan numbers
        let k = FreeCumulantSeq::new(vec![1.0; 8]).unwrap();
        let m = cumulants_to_moments(&k);
        let catalan = [1.0, 2.0, 5.0, 14.0, 42.0, 132.0, 429.0, 1430.0];
        for (j, &c) in catalan.iter().enumerate() {
            assert_abs_diff_eq!(m.get(j + 1), c, epsilon = 1e-9);
        }
    }

    /// Brute-force oracle: moments as sums over explicitly enumerated
    /// non-crossing partitions, independent of the recursion above.
    fn moments_by_enumeration(kappa: &[f64], order: usize) -> Vec<f64> {
        (1..=order)
            .map(|n| {
                non_crossing_partitions(n)
                    .iter()
                    .map(|p| p.iter().map(|b| kappa[b.len() - 1]).product::<f64>())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn recursion_agrees_with_partition_enumeration() {
        let cases: Vec<Vec<f64>> = vec![
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![1.0; 8],
            vec![0.3, -0.2, 0.9, 0.1, -0.4, 0.05, 0.6, -0.7],
        ];
        for kappa in cases {
            let seq = FreeCumulantSeq::new(kappa.clone()).unwrap();
            let m = cumulants_to_moments(&seq);
            let oracle = moments_by_enumeration(&kappa, 8);
            for j in 1..=8 {
                assert_abs_diff_eq!(m.get(j), oracle[j - 1], epsilon = 1e-9 * (1.0 + oracle[j - 1].abs()));
            }
            // and the inverse transform recovers the cumulants
            let k2 = moments_to_cumulants(&m);
            for j in 1..=8 {
                assert_abs_diff_eq!(k2.get(j), kappa[j - 1], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn partition_counts_are_catalan() {
        let catalan = [1usize, 2, 5, 14, 42, 132, 429, 1430];
        for (n, &c) in catalan.iter().enumerate() {
            assert_eq!(non_crossing_partitions(n + 1).len(), c);
        }
    }

    #[test]
    fn partitions_are_non_crossing_and_complete() {
        for p in non_crossing_partitions(6) {
            let mut seen = [false; 6];
            for block in &p {
                for &i in block {
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&b| b));
            // crossing check: i < j < k < l with i,k in one block and j,l in another
            for b1 in &p {
                for b2 in &p {
                    if b1 == b2 {
                        continue;
                    }
                    for &i in b1 {
                        for &k in b1 {
                            for &j in b2 {
                                for &l in b2 {
                                    assert!(!(i < j && j < k && k < l), "crossing in {p:?}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_moment_of_two_free_poissons() {
        // E[xyxy] for free x ~ Poisson(λa), y ~ Poisson(λb):
        // E[x^2]E[y]^2 + E[x]^2 E[y^2] - E[x]^2 E[y]^2
        let (la, lb) = (0.7, 1.3);
        let ka = vec![la; 4];
        let kb = vec![lb; 4];
        let got = mixed_moment(&[0, 1, 0, 1], &[&ka, &kb]);
        let (ex, ex2) = (la, la + la * la);
        let (ey, ey2) = (lb, lb + lb * lb);
        let want = ex2 * ey * ey + ex * ex * ey2 - ex * ex * ey * ey;
        assert_abs_diff_eq!(got, want, epsilon = 1e-12);
    }

    #[test]
    fn hankel_check_accepts_valid_and_rejects_invalid() {
        // free Poisson(1) moments are a valid moment sequence
        let m = MomentSeq::new(vec![1.0, 2.0, 5.0, 14.0, 42.0, 132.0]).unwrap();
        assert!(m.hankel_psd(1e-8).is_ok());
        // m_2 < m_1^2 is impossible
        let bad = MomentSeq::new(vec![1.0, 0.5]).unwrap();
        assert!(bad.hankel_psd(1e-8).is_err());
    }
}
