//! Per-point potentials `p[i] = -sum_j exp(-d[i][j] / sigma)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::DistanceMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    values: Vec<f64>,
    sigma: f64,
}

/// Correctly rounded sum of finite values (Shewchuk partials with half-even
/// correction, as in Python's `math.fsum`).
///
/// The result does not depend on the order of the terms, so potentials of
/// coincident or symmetric points compare equal exactly, and permuting the
/// dataset permutes the potentials without perturbing a single bit.
pub(crate) fn exact_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut partials: Vec<f64> = Vec::with_capacity(32);
    for mut x in terms {
        if x == 0.0 {
            continue;
        }
        let mut kept = 0;
        for k in 0..partials.len() {
            let mut y = partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }

    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

pub fn compute_potentials(d: &DistanceMatrix, sigma: f64) -> Result<PotentialField> {
    if sigma.is_nan() || sigma <= 0.0 || sigma.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if d.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "distance matrix holds a non-finite value".into(),
        ));
    }
    let values = (0..d.len())
        .into_par_iter()
        .map(|i| -exact_sum(d.row(i).iter().map(|&dij| (-dij / sigma).exp())))
        .collect();
    Ok(PotentialField { values, sigma })
}

impl PotentialField {
    /// Field with caller-chosen potentials, e.g. for hand-built tie configurations.
    pub fn from_values(values: Vec<f64>, sigma: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let n = values.len() as f64;
        if let Some(i) = values.iter().position(|&p| !(-n..=-1.0).contains(&p)) {
            return Err(Error::InvalidParameter(format!(
                "potential {} at {} outside [-{n}, -1]",
                values[i],
                i + 1
            )));
        }
        Ok(Self { values, sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// `p[i] - p[j]`; positive when `j` sits lower in the field than `i`.
    pub fn difference(&self, i: usize, j: usize) -> Result<f64> {
        let len = self.values.len();
        for index in [i, j] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index: index + 1, len });
            }
        }
        Ok(self.values[i] - self.values[j])
    }

    /// Number of distinct potential values (exact comparison).
    pub fn distinct_count(&self) -> usize {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::metrics::euclidean_distance_matrix;
    use approx::assert_relative_eq;

    fn field(xs: &[f64], sigma: f64) -> PotentialField {
        let ds = Dataset::from_numeric_rows(xs.iter().map(|&x| vec![x]).collect()).unwrap();
        compute_potentials(&euclidean_distance_matrix(&ds).unwrap(), sigma).unwrap()
    }

    // 40-digit mpmath evaluation of -sum_j exp(-|x_i - x_j|) for X = {0, 1, 2, 10, 11}.
    const D1_ORACLE: [f64; 5] = [
        -1.503276826038607744,
        -1.7359276920767338076,
        -1.5036735968400442049,
        -1.3683837135331939978,
        -1.3680649526060817317,
    ];

    #[test]
    fn d1_potentials_match_oracle() {
        let pf = field(&[0.0, 1.0, 2.0, 10.0, 11.0], 1.0);
        for (p, o) in pf.values().iter().zip(D1_ORACLE) {
            assert_relative_eq!(*p, o, max_relative = 1e-15);
        }
        let min = (0..5).min_by(|&a, &b| pf.get(a).total_cmp(&pf.get(b))).unwrap();
        assert_eq!(min, 1);
    }

    #[test]
    fn trivial_fields() {
        assert_eq!(field(&[4.2], 0.3).values(), &[-1.0]);
        assert_eq!(field(&[1.0, 1.0], 7.0).values(), &[-2.0, -2.0]);
    }

    #[test]
    fn differences() {
        let pf = field(&[0.0, 1.0, 2.0, 10.0, 11.0], 1.0);
        assert_relative_eq!(
            pf.difference(0, 1).unwrap(),
            0.23265086603812606359,
            max_relative = 1e-13
        );
        assert_eq!(pf.difference(3, 3).unwrap(), 0.0);
        assert_eq!(pf.difference(0, 2).unwrap(), -pf.difference(2, 0).unwrap());
        assert_eq!(pf.difference(0, 5), Err(Error::IndexOutOfRange { index: 6, len: 5 }));
        let flat = field(&[2.0, 2.0, 2.0], 1.0);
        assert_eq!(flat.difference(0, 2).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_sigma_and_distances() {
        let d = DistanceMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(compute_potentials(&d, 0.0).is_err());
        assert!(compute_potentials(&d, -1.0).is_err());
        assert!(compute_potentials(&d, f64::NAN).is_err());
        let inf = DistanceMatrix::from_row_major(2, vec![0.0, f64::INFINITY, f64::INFINITY, 0.0]).unwrap();
        assert!(compute_potentials(&inf, 1.0).is_err());
    }

    #[test]
    fn huge_sigma_collapses_to_minus_n() {
        let pf = field(&[0.0, 0.3, 1.7, 2.0], 1e18);
        assert!(pf.values().iter().all(|&p| p == -4.0));
        assert_eq!(pf.distinct_count(), 1);
    }

    #[test]
    fn moving_away_raises_potential() {
        let near = field(&[0.0, 1.0, 2.5], 1.0);
        let far = field(&[0.0, 1.0, 4.0], 1.0);
        assert!(far.get(2) > near.get(2));
    }

    #[test]
    fn exact_sum_is_order_free() {
        let terms = [1.0, 1e-16, 1e-16, 3.3e-17, 0.1, 0.2, 0.3];
        let forward = exact_sum(terms);
        let mut rev = terms;
        rev.reverse();
        assert_eq!(forward, exact_sum(rev));
        assert_eq!(exact_sum([0.1, 0.2]), 0.30000000000000004);
        assert_eq!(exact_sum([1.0, 1e-16, 1e-16]), 1.0000000000000002);
        assert_eq!(exact_sum(std::iter::empty()), 0.0);
    }

    #[test]
    fn from_values_checks_range() {
        assert!(PotentialField::from_values(vec![-1.0, -2.0], 1.0).is_ok());
        assert!(PotentialField::from_values(vec![-0.5, -2.0], 1.0).is_err());
        assert!(PotentialField::from_values(vec![-3.0, -2.0], 1.0).is_err());
    }
}
