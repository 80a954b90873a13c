//! Concrete configurations behind the figures, with the assertions they carry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::{pt, Bump, PerturbedQuadratic, Point, RadialProfile};
use crate::radial::{from_curvature, pin_support_end};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FixtureName {
    #[serde(rename = "FIG1_F")]
    Fig1F,
    #[serde(rename = "FIG1_FPM")]
    Fig1Fpm,
    #[serde(rename = "FIG2_SADDLE")]
    Fig2Saddle,
    #[serde(rename = "FIG3_NOSE")]
    Fig3Nose,
    #[serde(rename = "FIG_FE")]
    FigFe,
}

impl FixtureName {
    pub const ALL: [FixtureName; 5] = [Self::Fig1F, Self::Fig1Fpm, Self::Fig2Saddle, Self::Fig3Nose, Self::FigFe];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fig1F => "FIG1_F",
            Self::Fig1Fpm => "FIG1_FPM",
            Self::Fig2Saddle => "FIG2_SADDLE",
            Self::Fig3Nose => "FIG3_NOSE",
            Self::FigFe => "FIG_FE",
        }
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for FixtureName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// Critical values of the saddle fixture, ascending, from the bilinear grid oracle at `n = 400`.
pub const FIG2_CRITICAL_VALUES: [f64; 5] = [-0.425382503, -0.135932709, 0.0, 1.741526045, 1.874252177];
pub const FIG2_VALUE_TOL: f64 = 1e-6;

/// Two bumps of height 0.8 and radius 0.4 on the positive axes.
///
/// Each bump is steep enough to beat the slope of `q` and creates a pair of
/// new critical points: two on the x-axis above the value of the saddle and
/// two on the y-axis below it. The origin stays the saddle.
pub fn fig2_saddle() -> PerturbedQuadratic {
    PerturbedQuadratic {
        bumps: vec![
            Bump { center: [1.0, 0.0], amplitude: 0.8, radius: 0.4 },
            Bump { center: [0.0, 1.0], amplitude: 0.8, radius: 0.4 },
        ],
        offset: 0.0,
    }
}

/// A single bump placed so that `z` becomes a degenerate critical point of `q_h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nose {
    pub model: PerturbedQuadratic,
    pub z: [f64; 2],
    /// `|z − center| / radius`.
    pub rho: f64,
}

impl Nose {
    pub fn z_point(&self) -> Point {
        pt(self.z[0], self.z[1])
    }
}

/// Places a bump of radius `radius` so that `∇q_h(z) = 0` and `det Hess q_h(z) = 0`.
///
/// The centre sits on the ray from `z` against `∇q(z)`; the relative offset
/// `ρ` is the root of the Hessian determinant and the amplitude then follows
/// from cancelling the gradient.
pub fn nose(z: Point, radius: f64) -> Option<Nose> {
    let nz = z.norm();
    if nz == 0.0 || radius <= 0.0 {
        return None;
    }
    let e = pt(z.x, -z.y) / nz;
    let det = |rho: f64| {
        let w = 1.0 - rho * rho;
        let a = 2.0 * nz / (rho * radius);
        let b = 8.0 * nz * rho / (w * radius);
        (2.0 - a) * (-2.0 - a) + b * ((2.0 - a) * e.y * e.y + (-2.0 - a) * e.x * e.x)
    };
    // bracket the smallest sign change of det on (0, 1)
    let n = 4000;
    let mut lo = None;
    for i in 1..n - 1 {
        let (a, b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
        if det(a) * det(b) <= 0.0 {
            lo = Some((a, b));
            break;
        }
    }
    let (mut a, mut b) = lo?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if det(a) * det(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    let rho = if det(a).abs() <= det(b).abs() { a } else { b };
    let w = 1.0 - rho * rho;
    let amplitude = nz * radius / (3.0 * w * w * rho);
    let c = z - e * (rho * radius);
    Some(Nose {
        model: PerturbedQuadratic { bumps: vec![Bump { center: [c.x, c.y], amplitude, radius }], offset: 0.0 },
        z: [z.x, z.y],
        rho,
    })
}

/// Nose at `z = (1.2, 1.5)` with radius 0.5. The bump disk misses both axes.
pub fn fig3_nose() -> Nose {
    nose(pt(1.2, 1.5), 0.5).expect("fixture nose exists")
}

/// Non-positive bump centred at the origin, the local non-triviality witness.
pub fn negative_origin_bump() -> PerturbedQuadratic {
    PerturbedQuadratic { bumps: vec![Bump { center: [0.0, 0.0], amplitude: -0.3, radius: 0.5 }], offset: 0.0 }
}

/// Profile with `f(0) = −1`, flat on `[0, 1]`, slope rising to exactly 1 at
/// `s* = 2` and falling back to 0 at `s_max = 3`.
pub fn fig1_f() -> RadialProfile {
    pin_support_end(from_curvature(-1.0, &[0.0, 1.0, 1.5, 2.0, 2.5, 3.0], &[0.0, 0.0, 2.0, 0.0, -2.0, 0.0]).expect("fixture"))
}

pub const FIG1_S_STAR: f64 = 2.0;

/// `0.98 f`: slope stays below 1.
pub fn fig1_f_plus() -> RadialProfile {
    fig1_f().times(0.98)
}

/// `f(s / 1.01)`: slope stays below 1.
pub fn fig1_f_minus() -> RadialProfile {
    fig1_f().stretched(1.01)
}

/// Profile vanishing outside `(c − ε, c + ε) = (1.5, 2.5)`, dropping to
/// `−(k_norm + 1)` on a flat bottom; its only critical values are 0 and `−k_norm − 1`.
pub fn fig_fe(k_norm: f64) -> RadialProfile {
    let depth = k_norm + 1.0;
    // each half-ramp has width 0.075; f' reaches −v and returns over 0.3
    let v = depth / 0.15;
    let p = 2.0 * v / 0.15;
    pin_support_end(
        from_curvature(
            0.0,
            &[0.0, 1.6, 1.675, 1.75, 1.825, 1.9, 2.1, 2.175, 2.25, 2.325, 2.4],
            &[0.0, 0.0, -p, 0.0, p, 0.0, 0.0, p, 0.0, -p, 0.0],
        )
        .expect("fixture"),
    )
}

pub const FIG_FE_CENTER: f64 = 2.0;
pub const FIG_FE_EPS: f64 = 0.5;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in FixtureName::ALL {
            assert_eq!(n.as_str().parse::<FixtureName>().unwrap(), n);
        }
        assert!("FIG9".parse::<FixtureName>().is_err());
    }

    #[test]
    fn nose_is_degenerate_critical() {
        let nose = fig3_nose();
        let h = &nose.model;
        let z = nose.z_point();
        assert!(h.grad(z).norm() < 1e-13);
        assert!(h.hessian(z).determinant().abs() < 1e-12);
        let b = h.bumps[0];
        assert!(b.center[0] - b.radius > 0.0 && b.center[1] - b.radius > 0.0);
        assert!(h.eval(z) < 0.0);
    }

    #[test]
    fn fig1_shape() {
        let f = fig1_f();
        assert_eq!(f.eval(FIG1_S_STAR), (-0.5, 1.0));
        assert!(f.smoothness_defect() < 1e-12);
        assert_eq!(f.eval(3.0), (0.0, 0.0));
        assert!(fig1_f_plus().sup_distance(&f) <= 0.05);
        assert!(fig1_f_minus().sup_distance(&f) <= 0.05);
    }

    #[test]
    fn fe_shape() {
        let f = fig_fe(3.0);
        assert!((f.value_range().0 + 4.0).abs() < 1e-12);
        assert!(f.eval(2.4).0.abs() < 1e-12);
        assert!(f.smoothness_defect() < 1e-9);
    }
}
