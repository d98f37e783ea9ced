//! Circular statistics over the angles that matrix rows make with `e₁`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::{angle_between, RealMatrix};
use crate::{Error, Result};

/// Row angles in radians, each in `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSet(Vec<f64>);

impl AngleSet {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidArgument("angle set is empty".into()));
        }
        if angles.iter().any(|a| !(0.0..=PI).contains(a)) {
            return Err(Error::Domain("angles must lie in [0, π]"));
        }
        Ok(Self(angles))
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn resultant(&self) -> (f64, f64) {
        let c = self.0.iter().map(|a| libm::cos(*a)).sum();
        let s = self.0.iter().map(|a| libm::sin(*a)).sum();
        (c, s)
    }
}

/// `θₖ = angle(row k, e₁)`.
pub fn row_angles(m: &RealMatrix) -> Result<AngleSet> {
    let mut q = alloc::vec![0.0; m.cols()];
    q[0] = 1.0;
    AngleSet::new((0..m.rows()).map(|k| angle_between(m.row(k), &q)).collect::<Result<_>>()?)
}

/// Mean direction from the quadrant-aware arctangent of `S/C`.
pub fn circular_mean(a: &AngleSet) -> Result<f64> {
    let (c, s) = a.resultant();
    mean_direction(c, s)
}

/// Mean direction for cosine sum `c` and sine sum `s`.
pub fn mean_direction(c: f64, s: f64) -> Result<f64> {
    if c > 0.0 && s >= 0.0 {
        Ok(libm::atan(s / c))
    } else if c == 0.0 && s > 0.0 {
        Ok(PI / 2.0)
    } else if c < 0.0 {
        Ok(libm::atan(s / c) + PI)
    } else if c == 0.0 && s < 0.0 {
        Ok(3.0 * PI / 2.0)
    } else if c > 0.0 && s < 0.0 {
        Ok(libm::atan(s / c) + 2.0 * PI)
    } else {
        Err(Error::UndefinedMean)
    }
}

/// `V = 1 − √(C² + S²)/n`.
pub fn circular_variance(a: &AngleSet) -> f64 {
    let (c, s) = a.resultant();
    (1.0 - libm::sqrt(c * c + s * s) / a.len() as f64).clamp(0.0, 1.0)
}

fn wrapped(d: f64) -> f64 {
    PI - libm::fabs(PI - libm::fabs(d))
}

/// Average wrapped difference over all pairs.
pub fn mean_circular_difference(c: &AngleSet, t: &AngleSet) -> f64 {
    let mut acc = 0.0;
    for &x in c.angles() {
        for &y in t.angles() {
            acc += wrapped(x - y);
        }
    }
    acc / (c.len() * t.len()) as f64
}

/// Average wrapped difference between corresponding angles.
pub fn modified_circular_mean_difference(c: &AngleSet, t: &AngleSet) -> Result<f64> {
    if c.len() != t.len() {
        return Err(Error::DimensionMismatch(alloc::format!("{} and {} angles", c.len(), t.len())));
    }
    Ok(c.angles().iter().zip(t.angles()).map(|(x, y)| wrapped(x - y)).sum::<f64>() / c.len() as f64)
}

/// `(θ̄ in degrees, V, D̄mod in radians)` for a transform's angle rows against
/// the exact DCT of the same size.
pub fn circular_summary(rows: &RealMatrix) -> Result<(f64, f64, f64)> {
    let t = row_angles(rows)?;
    let c = row_angles(&crate::linalg::exact_dct_matrix(rows.rows())?)?;
    Ok((circular_mean(&t)?.to_degrees(), circular_variance(&t), modified_circular_mean_difference(&c, &t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_transform;
    use crate::linalg::exact_dct_matrix;

    #[test]
    fn identity_angles() {
        let a = row_angles(&RealMatrix::identity(8)).unwrap();
        assert_eq!(a.angles()[0], 0.0);
        assert!(a.angles()[1..].iter().all(|&x| (x - PI / 2.0).abs() < 1e-15));
    }

    #[test]
    fn sdct_angles_coincide() {
        let a = row_angles(&get_transform("SDCT").unwrap().angle_rows()).unwrap();
        let expected = libm::acos(1.0 / libm::sqrt(8.0));
        assert!(a.angles().iter().all(|&x| (x - expected).abs() < 1e-12));
        assert!(circular_variance(&a) < 1e-12);
        assert!((circular_mean(&a).unwrap().to_degrees() - 69.29).abs() < 0.01);
    }

    #[test]
    fn equal_angles_mean() {
        for alpha in [0.1, 1.0, 2.5, PI] {
            let a = AngleSet::new(alloc::vec![alpha; 8]).unwrap();
            assert!((circular_mean(&a).unwrap() - alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_direction_quadrants() {
        assert_eq!(mean_direction(0.0, 0.0), Err(Error::UndefinedMean));
        assert_eq!(mean_direction(0.0, 2.0).unwrap(), PI / 2.0);
        assert_eq!(mean_direction(0.0, -2.0).unwrap(), 3.0 * PI / 2.0);
        assert!((mean_direction(-1.0, 1.0).unwrap() - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((mean_direction(-1.0, -1.0).unwrap() - 5.0 * PI / 4.0).abs() < 1e-15);
        assert!((mean_direction(1.0, -1.0).unwrap() - 7.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn printed_circular_values() {
        // (name, θ̄ degrees, V, D̄mod)
        let expected = [
            ("DCT", 70.53, 0.0089, 0.0),
            ("T1", 71.12, 0.0124, 0.0711),
            ("T2", 71.12, 0.0124, 0.0343),
            ("SDCT", 69.29, 0.0, 0.1062),
            ("RDCT", 71.98, 0.0174, 0.0716),
            ("LO", 70.81, 0.0102, 0.0483),
            ("T4", 70.57, 0.0085, 0.0781),
            ("T6", 71.27, 0.0139, 0.0497),
            ("BAS-2008b", 67.29, 0.0015, 0.1097),
        ];
        for (name, theta, v, d) in expected {
            let (t, var, dm) = circular_summary(&get_transform(name).unwrap().angle_rows()).unwrap();
            assert!((t - theta).abs() <= 0.01, "{name} θ̄ {t}");
            assert!((var - v).abs() <= 5e-4, "{name} V {var}");
            assert!((dm - d).abs() <= 5e-4, "{name} D {dm}");
        }
    }

    #[test]
    fn pairwise_difference_matches_double_loop() {
        let c = row_angles(&exact_dct_matrix(8).unwrap()).unwrap();
        let t = row_angles(&get_transform("SDCT").unwrap().angle_rows()).unwrap();
        let mut brute = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                let d = c.angles()[i] - t.angles()[j];
                brute += PI - (PI - d.abs()).abs();
            }
        }
        assert!((mean_circular_difference(&c, &t) - brute / 64.0).abs() < 1e-15);
        assert!((mean_circular_difference(&c, &t) - mean_circular_difference(&t, &c)).abs() < 1e-15);
    }

    #[test]
    fn zero_row_is_domain_error() {
        let m = RealMatrix::from_fn(2, 2, |i, j| if i == 1 { 0.0 } else { j as f64 + 1.0 });
        assert!(matches!(row_angles(&m), Err(Error::Domain(_))));
    }
}
