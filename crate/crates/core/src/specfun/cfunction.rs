//! Harish-Chandra c-function and Plancherel density.

use super::gamma::{ln_gamma, ln_gamma_real};
use crate::error::{domain, HypError, Result};
use crate::geometry::Space;
use num_complex::Complex64;

/// `c(lambda) = 2^{Q-2i lambda} Gamma(2i lambda) / Gamma((Q+2i lambda)/2)
///   * Gamma(n/2) / Gamma((m_v + 4i lambda + 2)/4)`.
pub fn harish_chandra_c(space: &Space, lambda: f64) -> Result<Complex64> {
    Ok(ln_c(space, lambda)?.exp())
}

fn ln_c(space: &Space, lambda: f64) -> Result<Complex64> {
    let (m_v, _) = match *space {
        Space::DamekRicci { m_v, m_z } => (m_v as f64, m_z as f64),
        Space::Euclidean { .. } => {
            return Err(HypError::Unsupported("Euclidean space has no c-function".into()))
        }
    };
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(HypError::Pole(format!("c-function is singular at lambda = {lambda}")));
    }
    let q = space.q();
    let n = space.dim() as f64;
    let il = Complex64::new(0.0, lambda);
    Ok((q - 2.0 * il) * std::f64::consts::LN_2 + ln_gamma(2.0 * il)
        - ln_gamma((q + 2.0 * il) / 2.0)
        + ln_gamma_real(n / 2.0)
        - ln_gamma((m_v + 4.0 * il + 2.0) / 4.0))
}

/// Plancherel weight: `|c(lambda)|^{-2}` on Damek-Ricci spaces, `lambda^{n-1}`
/// on Euclidean space.
pub fn plancherel_density(space: &Space, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return domain(format!("plancherel density needs lambda > 0, got {lambda}"));
    }
    Ok(plancherel_unchecked(space, lambda))
}

pub(crate) fn plancherel_unchecked(space: &Space, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    match *space {
        Space::Euclidean { n } => lambda.powi(n as i32 - 1),
        _ => (-2.0 * ln_c(space, lambda).expect("nonzero lambda").re).exp(),
    }
}

/// Coefficient bound `C mu^d (1 + |lambda|)^{-1}` for the expansion
/// coefficients of the Harish-Chandra series; `Gamma_0 = 1`.
pub fn anker_coefficient_bound(mu: u32, lambda: f64, c: f64, d: f64) -> Result<f64> {
    if mu == 0 {
        return Ok(1.0);
    }
    if lambda == 0.0 {
        return Err(HypError::Pole("coefficient bound needs lambda != 0".into()));
    }
    Ok(c * (mu as f64).powf(d) / (1.0 + lambda.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn h3_c_function_is_one_over_i_lambda() {
        let h3 = Space::h3();
        for &l in &[1e-3, 0.1, 1.0, 7.5, 300.0] {
            let c = harish_chandra_c(&h3, l).unwrap();
            let expected = Complex64::new(0.0, -1.0 / l);
            assert!((c - expected).norm() < 1e-12 * expected.norm(), "lambda={l}: {c}");
            assert_relative_eq!(plancherel_density(&h3, l).unwrap(), l * l, max_relative = 1e-12);
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for sp in [Space::h3(), Space::damek_ricci(2, 1).unwrap(), Space::damek_ricci(4, 3).unwrap()] {
            for &l in &[0.01, 0.5, 3.0, 40.0] {
                let a = harish_chandra_c(&sp, -l).unwrap();
                let b = harish_chandra_c(&sp, l).unwrap().conj();
                assert!((a - b).norm() <= 1e-12 * b.norm());
            }
        }
    }

    #[test]
    fn reference_values() {
        let sp = Space::damek_ricci(2, 1).unwrap();
        let c = harish_chandra_c(&sp, 1.0).unwrap();
        assert!((c.re - REF_21_RE).abs() < 1e-12 && (c.im - REF_21_IM).abs() < 1e-12, "{c}");
        let sp = Space::damek_ricci(4, 3).unwrap();
        assert_relative_eq!(plancherel_density(&sp, 2.5).unwrap(), REF_43_PLANCHEREL, max_relative = 1e-12);
    }

    const REF_21_RE: f64 = -0.684_621_054_684_060_04;
    const REF_21_IM: f64 = -0.894_308_121_534_713_69;
    const REF_43_PLANCHEREL: f64 = 0.306_050_380_227_250_13;

    #[test]
    fn errors() {
        assert!(harish_chandra_c(&Space::h3(), 0.0).is_err());
        assert!(plancherel_density(&Space::h3(), -1.0).is_err());
        assert_eq!(plancherel_density(&Space::euclidean(3).unwrap(), 2.0).unwrap(), 4.0);
        assert_eq!(anker_coefficient_bound(0, 5.0, 1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(anker_coefficient_bound(2, 1.0, 1.0, 1.0).unwrap(), 1.0);
    }
}
