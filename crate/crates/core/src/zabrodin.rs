//! The p-adic action `S(φ)` in momentum form `(R/2) ∫ |k| φ̂(k) φ̂(-k) dk`
//! and position form `C ∫∫ (φ(x) - φ(y))² / |x - y|² dx dy`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{BruhatFunction, Place};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActionValue {
    pub momentum_form: f64,
    pub position_form: f64,
    pub difference: f64,
    pub place: Place,
}

fn require_real(phi: &BruhatFunction) -> Result<()> {
    if phi.terms().iter().any(|(c, _)| c.im.abs() > 1e-14 * (1.0 + c.re.abs())) {
        Err(Error::NonReal)
    } else {
        Ok(())
    }
}

/// `∫ |k| |ψ(k)|² dk`, summed ball by ball so that small values of `ψ` are
/// squared exactly rather than pruned from a product.
fn integrate_abs_squared(psi: &BruhatFunction) -> f64 {
    let q = psi.p() as f64;
    let scale = q.powf(-(psi.delta() as f64) / 2.0) * (1.0 - 1.0 / q);
    psi.terms()
        .iter()
        .map(|(c, b)| match b.abs_value() {
            Some(a) => c.norm_sqr() * b.volume(psi.delta()) * a,
            // Σ_{j ≥ n} q^{-j} vol(|k| = q^{-j})
            None => c.norm_sqr() * scale * q.powi(-2 * b.radius_exp()) / (1.0 - 1.0 / (q * q)),
        })
        .sum()
}

pub fn action_momentum(phi: &BruhatFunction) -> Result<f64> {
    require_real(phi)?;
    let q = phi.p() as f64;
    let r = q.powf(-(phi.delta() as f64) / 2.0) * (1.0 - 1.0 / q) / q.ln();
    // φ real gives φ̂(-k) = conj φ̂(k)
    let hat = phi.fourier()?;
    Ok(r / 2.0 * integrate_abs_squared(&hat))
}

/// `∫∫ (φ(x) - φ(y))² / |x - y|² dx dy` over the disjoint canonical balls:
/// distinct balls sit at the constant distance of their centres, and the
/// complement of a ball `B(x, n)` contributes `q^{-δ/2} q^{n-1}`.
fn position_double_sum(phi: &BruhatFunction) -> f64 {
    let q = phi.p() as f64;
    let delta = phi.delta();
    let terms = phi.terms();
    let vols: Vec<f64> = terms.iter().map(|(_, b)| b.volume(delta)).collect();
    let mut total = 0.0;
    for (i, (ci, bi)) in terms.iter().enumerate() {
        let ci = ci.re;
        let mut near = 0.0;
        for (j, (cj, bj)) in terms.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = bi.center().sub(bj.center()).abs();
            let w = vols[j] / (d * d);
            total += (ci - cj.re).powi(2) * vols[i] * w;
            near += w;
        }
        let outside = q.powf(-(delta as f64) / 2.0) * q.powi(bi.radius_exp() - 1) - near;
        total += 2.0 * ci * ci * vols[i] * outside;
    }
    total
}

pub fn action_position(phi: &BruhatFunction) -> Result<f64> {
    require_real(phi)?;
    let q = phi.p() as f64;
    let c = q * (q - 1.0) * q.powi(phi.delta() as i32) / (4.0 * (q + 1.0) * q.ln());
    Ok(c * position_double_sum(phi))
}

pub fn action_equality_check(phi: &BruhatFunction) -> Result<ActionValue> {
    let momentum_form = action_momentum(phi)?;
    let position_form = action_position(phi)?;
    Ok(ActionValue {
        momentum_form,
        position_form,
        difference: momentum_form - position_form,
        place: Place::Finite {
            p: phi.p(),
            delta: phi.delta(),
        },
    })
}
