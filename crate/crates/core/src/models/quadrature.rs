//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error meets `max(abs_tol, rel_tol·|I|)` or the subdivision budget runs out.
//! Error estimates follow the QUADPACK `qk15` heuristic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, TailError};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * f64::min(1.0, (200.0 * error / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

/// `∫_a^b f`. The integrand is never evaluated at the endpoints.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let first = kronrod15(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    let mut subdivisions = 1;
    while error > tol.abs.max(tol.rel * value.abs()) {
        if subdivisions >= tol.max_subdivisions {
            return Err(TailError::Numeric {
                achieved: error,
                target: tol.abs.max(tol.rel * value.abs()),
            });
        }
        let worst = heap.pop().expect("heap holds every live segment");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    // re-sum to drop the drift of the running updates
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        error,
        subdivisions,
    })
}

/// `∫_0^∞ g(t) dt` through `t = (1 - x)/x`, `dt = dx/x²`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(g: F, tol: Tolerance) -> Result<QuadratureResult> {
    integrate(
        |x: f64| {
            let t = (1.0 - x) / x;
            let w = g(t) / (x * x);
            if w.is_finite() {
                w
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn half_line_gamma_integrals() {
        // ∫ t^p e^{-t} dt = Γ(p+1)
        for (p, expect) in [
            (0.25, 0.906_402_477_055_477_f64),
            (1.0, 1.0),
            (5.0, 120.0),
            (10.0, 3_628_800.0),
        ] {
            let r = integrate_half_line(|t| t.powf(p) * (-t).exp(), Tolerance::default()).unwrap();
            assert!(
                (r.value - expect).abs() <= 1e-9 * expect,
                "p = {p}: {}",
                r.value
            );
            assert!(r.error <= 1e-8 * expect);
        }
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} = 2
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_reports_error() {
        let tight = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| x.powf(-0.9), 0.0, 1.0, tight).unwrap_err();
        assert!(matches!(err, TailError::Numeric { achieved, .. } if achieved > 0.0));
    }
}
