//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Published 30-digit nodes and weights, kept verbatim.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate over `[a, b]` and its error estimate `|K15 - G7|`.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug)]
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

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

/// Integrates `f` over the partition given by `breakpoints` (sorted, at least
/// two entries), bisecting the segment with the largest error estimate until
/// the summed error is below `rel_tol * |value|` (or `abs_tol`).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    if breakpoints.len() < 2
        || breakpoints
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
    {
        return Err(Error::InvalidArgument(
            "breakpoints must be strictly increasing with at least two entries".into(),
        ));
    }
    let mut heap: BinaryHeap<Segment> = breakpoints
        .windows(2)
        .map(|w| {
            let (value, error) = gauss_kronrod_15(f, w[0], w[1]);
            Segment {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();
    let mut subdivisions = heap.len();
    loop {
        // re-summing keeps rounding from accumulating across many updates
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if error <= (rel_tol * value.abs()).max(abs_tol) {
            return Ok(Integral {
                value,
                error,
                subdivisions,
            });
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::QuadratureDiverged {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine precision
            return Err(Error::QuadratureDiverged {
                subdivisions,
                estimate: value,
                error,
            });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gauss_kronrod_15(f, a, b);
            heap.push(Segment { a, b, value, error });
        }
        subdivisions += 1;
    }
}
