//! Closed-form star fidelities and literature cloning bounds.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dynamics::StarCoefficients;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Xy,
    Heisenberg,
}

impl Model {
    pub fn lambda(self) -> f64 {
        match self {
            Model::Xy => 0.0,
            Model::Heisenberg => 1.0,
        }
    }
}

/// Blank-site fidelity of a 1 -> M star from the input amplitudes
/// `(alpha, beta)` and the evolved one-excitation coefficients. The blank's
/// reduced matrix is
///
/// ```text
/// [ |a|^2 + |b1|^2 + (1 - 1/M)|b2|^2    a b2^* / sqrt M ]
/// [ a^* b2 / sqrt M                     |b2|^2 / M      ]
/// ```
pub fn fidelity_from_coefficients(m: usize, alpha: C64, beta: C64, c: StarCoefficients) -> f64 {
    let mf = m as f64;
    let (a2, b2) = (alpha.norm_sqr(), beta.norm_sqr());
    let rho00 = a2 + c.beta1.norm_sqr() + (1.0 - 1.0 / mf) * c.beta2.norm_sqr();
    let rho11 = c.beta2.norm_sqr() / mf;
    let cross = 2.0 * (beta.conj() * c.beta2).re * a2 / mf.sqrt();
    a2 * rho00 + b2 * rho11 + cross
}

/// Optimal star fidelity for input polar angle `theta`.
///
/// Heisenberg (at `t = 2 pi / (M + 1)`, zero field):
/// `[4 + M(3 + M) + (M - 1)((3 + M) cos theta - cos 2 theta)] / (2 (1 + M)^2)`.
///
/// XY (at `b = sqrt M / 2`, `t = pi / sqrt M`, where the hub amplitude
/// vanishes and the symmetric blank mode carries the full input amplitude):
/// `c^2 + s^2 / M + c s (1 - 1/M) + 2 c s / sqrt M` with `c = cos^2(theta/2)`,
/// `s = sin^2(theta/2)`.
pub fn closed_form_fidelity(model: Model, m: usize, theta: f64) -> f64 {
    let mf = m as f64;
    match model {
        Model::Heisenberg => {
            (4.0 + mf * (3.0 + mf) + (mf - 1.0) * ((3.0 + mf) * theta.cos() - (2.0 * theta).cos()))
                / (2.0 * (1.0 + mf).powi(2))
        }
        Model::Xy => {
            let c = (theta / 2.0).cos().powi(2);
            let s = (theta / 2.0).sin().powi(2);
            c * c + s * s / mf + c * s * (1.0 - 1.0 / mf) + 2.0 * c * s / mf.sqrt()
        }
    }
}

/// Optimal `(b, t)` of the star for each model.
pub fn optimal_parameters(model: Model, m: usize) -> (f64, f64) {
    let mf = m as f64;
    match model {
        Model::Xy => (mf.sqrt() / 2.0, PI / mf.sqrt()),
        Model::Heisenberg => (0.0, 2.0 * PI / (mf + 1.0)),
    }
}

/// Table of optimal N -> M phase-covariant fidelities for qubits with N > 1.
const NM_BOUNDS: [((usize, usize), f64); 10] = [
    ((2, 3), 0.941),
    ((2, 4), 0.933),
    ((2, 5), 0.912),
    ((2, 6), 0.908),
    ((2, 7), 0.898),
    ((2, 8), 0.895),
    ((3, 4), 0.973),
    ((3, 5), 0.970),
    ((3, 6), 0.956),
    ((3, 7), 0.954),
];

/// Optimal phase-covariant cloning fidelity for `N -> M` copies of a
/// `d`-level system, where a closed form or tabulated value is known:
///
/// * qubits, `1 -> M`: `(1 + (M+1)/(2M)) / 2` for odd `M`,
///   `(1 + sqrt(M(M+2))/(2M)) / 2` for even `M`;
/// * qutrits, `1 -> M` with `M = 3k + 1`: `(1 + 2(M+2)/(3M)) / 3`;
/// * qudits, `1 -> 2`: `1/d + (d - 2 + sqrt(d^2 + 4d - 4)) / (4d)`;
/// * qubits, `N -> M` for the tabulated pairs with `N` = 2, 3.
pub fn optimal_pcc_bound(n: usize, m: usize, d: usize) -> Result<f64> {
    let unsupported = Error::UnsupportedBound { n, m, d };
    if n == 0 || m < n || d < 2 {
        return Err(unsupported);
    }
    let mf = m as f64;
    let df = d as f64;
    match (n, d) {
        (1, 2) => Ok(if m % 2 == 1 {
            0.5 * (1.0 + (mf + 1.0) / (2.0 * mf))
        } else {
            0.5 * (1.0 + (mf * (mf + 2.0)).sqrt() / (2.0 * mf))
        }),
        (1, _) if m == 2 => Ok(1.0 / df + (df - 2.0 + (df * df + 4.0 * df - 4.0).sqrt()) / (4.0 * df)),
        (1, 3) if m % 3 == 1 => Ok((1.0 + 2.0 * (mf + 2.0) / (3.0 * mf)) / 3.0),
        (_, 2) => NM_BOUNDS.iter().find(|(k, _)| *k == (n, m)).map(|(_, v)| *v).ok_or(unsupported),
        _ => Err(unsupported),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{star_coeffs_heisenberg, star_coeffs_xy};
    use approx::assert_relative_eq;

    fn amps(theta: f64) -> (C64, C64) {
        (C64::new((theta / 2.0).cos(), 0.0), C64::new((theta / 2.0).sin(), 0.0))
    }

    #[test]
    fn closed_forms_follow_from_coefficients() {
        for m in 1..=10 {
            for k in 0..=20 {
                let theta = PI * k as f64 / 20.0;
                let (a, b) = amps(theta);
                let (bx, tx) = optimal_parameters(Model::Xy, m);
                let fx = fidelity_from_coefficients(m, a, b, star_coeffs_xy(m, b, bx, tx));
                assert_relative_eq!(fx, closed_form_fidelity(Model::Xy, m, theta), epsilon = 1e-13);
                let (_, th) = optimal_parameters(Model::Heisenberg, m);
                let fh = fidelity_from_coefficients(m, a, b, star_coeffs_heisenberg(m, b, th));
                assert_relative_eq!(fh, closed_form_fidelity(Model::Heisenberg, m, theta), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn printed_special_cases() {
        let s2 = 2f64.sqrt();
        for k in 0..=50 {
            let th = PI * k as f64 / 50.0;
            let heis = (14.0 + 5.0 * th.cos() - (2.0 * th).cos()) / 18.0;
            let xy = (5.0 + 2.0 * th.cos() + (2.0 * th).cos() + 2.0 * s2 * th.sin().powi(2)) / 8.0;
            assert_relative_eq!(closed_form_fidelity(Model::Heisenberg, 2, th), heis, epsilon = 1e-14);
            assert_relative_eq!(closed_form_fidelity(Model::Xy, 2, th), xy, epsilon = 1e-14);
        }
        for m in 1..=10 {
            let mf = m as f64;
            let eq = PI / 2.0;
            assert_relative_eq!(closed_form_fidelity(Model::Heisenberg, m, eq), 0.5 + 1.0 / (1.0 + mf), epsilon = 1e-14);
            assert_relative_eq!(closed_form_fidelity(Model::Xy, m, eq), 0.5 * (1.0 + 1.0 / mf.sqrt()), epsilon = 1e-14);
        }
        assert_relative_eq!(closed_form_fidelity(Model::Xy, 2, PI / 2.0), 0.5 + 1.0 / 8f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(closed_form_fidelity(Model::Xy, 9, PI / 2.0), 2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(closed_form_fidelity(Model::Heisenberg, 2, 0.0), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn xy_beats_heisenberg_on_equator() {
        for m in 2..=10 {
            assert!(closed_form_fidelity(Model::Xy, m, PI / 2.0) >= closed_form_fidelity(Model::Heisenberg, m, PI / 2.0));
        }
    }

    #[test]
    fn bounds() {
        assert_relative_eq!(optimal_pcc_bound(1, 3, 2).unwrap(), 5.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(optimal_pcc_bound(1, 2, 2).unwrap(), 0.5 + 1.0 / 8f64.sqrt(), epsilon = 1e-15);
        assert_eq!(optimal_pcc_bound(2, 3, 2).unwrap(), 0.941);
        assert_relative_eq!(optimal_pcc_bound(1, 4, 3).unwrap(), (1.0 + 2.0 * 6.0 / 12.0) / 3.0, epsilon = 1e-15);
        let qutrit = optimal_pcc_bound(1, 2, 3).unwrap();
        let snc = (4.0 + 2.0 * 2f64.sqrt()) / 9.0;
        assert!(qutrit > snc && (qutrit - snc - 2e-3).abs() < 1e-3);
        assert!(optimal_pcc_bound(2, 9, 2).is_err());
        assert!(optimal_pcc_bound(1, 5, 3).is_err());
        assert!(optimal_pcc_bound(3, 2, 2).is_err());
    }

    #[test]
    fn star_never_exceeds_bound() {
        for m in 1..=12 {
            let bound = optimal_pcc_bound(1, m, 2).unwrap();
            assert!(closed_form_fidelity(Model::Xy, m, PI / 2.0) <= bound + 1e-15);
            assert!(closed_form_fidelity(Model::Heisenberg, m, PI / 2.0) <= bound + 1e-15);
        }
    }
}
