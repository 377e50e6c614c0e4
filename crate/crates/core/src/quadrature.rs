//! Adaptive Gauss–Kronrod (21-point) integration with a global error
//! queue, a vector-valued variant for moment integrals, and fixed
//! Gauss–Legendre panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_520_726,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights, attached to XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// 4-point Gauss–Legendre on [-1, 1].
pub const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
pub const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Default cap on the number of live subintervals.
pub const MAX_INTERVALS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const K: usize> {
    pub value: [f64; K],
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl Estimate<1> {
    pub fn scalar(&self) -> f64 {
        self.value[0]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: MAX_INTERVALS,
        }
    }
}

struct Panel<const K: usize> {
    a: f64,
    b: f64,
    value: [f64; K],
    error: f64,
}

impl<const K: usize> PartialEq for Panel<K> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const K: usize> Eq for Panel<K> {}
impl<const K: usize> PartialOrd for Panel<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const K: usize> Ord for Panel<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
fn gk21<const K: usize, F>(f: &mut F, a: f64, b: f64) -> ([f64; K], f64)
where
    F: FnMut(f64) -> [f64; K],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [[0.0; K]; 10];
    let mut fv2 = [[0.0; K]; 10];
    let fc = f(center);
    let mut kron = [0.0; K];
    let mut gauss = [0.0; K];
    let mut res_abs = [0.0; K];
    for k in 0..K {
        kron[k] = fc[k] * WGK[10];
        res_abs[k] = kron[k].abs();
    }
    for j in 0..10 {
        let x = half * XGK[j];
        let y1 = f(center - x);
        let y2 = f(center + x);
        for k in 0..K {
            let s = y1[k] + y2[k];
            kron[k] += WGK[j] * s;
            res_abs[k] += WGK[j] * (y1[k].abs() + y2[k].abs());
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
        fv1[j] = y1;
        fv2[j] = y2;
    }
    let mut err = 0.0_f64;
    let mut value = [0.0; K];
    for k in 0..K {
        let mean = 0.5 * kron[k];
        let mut res_asc = WGK[10] * (fc[k] - mean).abs();
        for j in 0..10 {
            res_asc += WGK[j] * ((fv1[j][k] - mean).abs() + (fv2[j][k] - mean).abs());
        }
        let e = rescale_error(
            (kron[k] - gauss[k]) * half,
            res_abs[k] * half.abs(),
            res_asc * half.abs(),
        );
        err = err.max(e);
        value[k] = kron[k] * half;
    }
    (value, err)
}

impl Adaptive {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_tols(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrate a scalar function over `[a, b]`.
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64) -> Estimate<1>
    where
        F: FnMut(f64) -> f64,
    {
        self.integrate_vec(|x| [f(x)], &[a, b])
    }

    /// Integrate over consecutive breakpoints `points[0] < points[1] < ...`.
    pub fn integrate_with_breaks<F>(&self, mut f: F, points: &[f64]) -> Estimate<1>
    where
        F: FnMut(f64) -> f64,
    {
        self.integrate_vec(|x| [f(x)], points)
    }

    /// Vector-valued integration; the error is the max over components and
    /// the relative tolerance is taken against the largest component.
    pub fn integrate_vec<const K: usize, F>(&self, mut f: F, points: &[f64]) -> Estimate<K>
    where
        F: FnMut(f64) -> [f64; K],
    {
        let mut heap: BinaryHeap<Panel<K>> = BinaryHeap::new();
        let mut total = [0.0; K];
        let mut total_err = 0.0;
        let mut settled = [0.0; K];
        let mut settled_err = 0.0;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b == a {
                continue;
            }
            let (v, e) = gk21(&mut f, a, b);
            for k in 0..K {
                total[k] += v[k];
            }
            total_err += e;
            heap.push(Panel {
                a,
                b,
                value: v,
                error: e,
            });
        }
        let tol = |t: &[f64; K]| {
            let m = t.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            self.abs_tol.max(self.rel_tol * m)
        };
        let mut converged = total_err <= tol(&total);
        while !converged && heap.len() < self.max_intervals {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b)
                || (worst.b - worst.a).abs() < 1e-15 * mid.abs().max(f64::MIN_POSITIVE)
            {
                // Panel can no longer be split in floating point.
                for k in 0..K {
                    settled[k] += worst.value[k];
                }
                settled_err += worst.error;
                if heap.is_empty() {
                    break;
                }
                continue;
            }
            let (v1, e1) = gk21(&mut f, worst.a, mid);
            let (v2, e2) = gk21(&mut f, mid, worst.b);
            for k in 0..K {
                total[k] += v1[k] + v2[k] - worst.value[k];
            }
            total_err += e1 + e2 - worst.error;
            heap.push(Panel {
                a: worst.a,
                b: mid,
                value: v1,
                error: e1,
            });
            heap.push(Panel {
                a: mid,
                b: worst.b,
                value: v2,
                error: e2,
            });
            converged = total_err <= tol(&total);
        }
        // Re-sum from the panels to shed accumulated cancellation.
        let mut value = settled;
        let mut error = settled_err;
        let intervals = heap.len();
        for p in heap.into_iter() {
            for k in 0..K {
                value[k] += p.value[k];
            }
            error += p.error;
        }
        Estimate {
            value,
            error,
            intervals,
            converged: converged || error <= tol(&value),
        }
    }
}

/// Fixed 4-point Gauss–Legendre rule over `[a, b]`, vector-valued.
pub fn gauss_legendre4<const K: usize, F>(mut f: F, a: f64, b: f64) -> [f64; K]
where
    F: FnMut(f64) -> [f64; K],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; K];
    for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
        let y = f(c + h * x);
        for k in 0..K {
            out[k] += w * h * y[k];
        }
    }
    out
}
