//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! The integrand is evaluated in batches so callers can fan the nodes out
//! over a thread pool; the refinement order depends only on the values,
//! never on scheduling. The final panel partition is returned as a plan
//! that can be replayed on a different integrand.

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

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const NODES_PER_PANEL: usize = 15;

/// Abscissae of the 15-point rule on `[a, b]`, in a fixed order.
pub fn panel_nodes(a: f64, b: f64) -> [f64; NODES_PER_PANEL] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [0.0; NODES_PER_PANEL];
    for j in 0..7 {
        x[2 * j] = c - h * XGK[j];
        x[2 * j + 1] = c + h * XGK[j];
    }
    x[14] = c;
    x
}

/// Kronrod estimate and |Kronrod - Gauss| from values at `panel_nodes`.
pub fn panel_rule(a: f64, b: f64, vals: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let h = 0.5 * (b - a);
    let m = vals[14].len();
    let mut k = vec![0.0; m];
    let mut g = vec![0.0; m];
    for c in 0..m {
        let mut sk = WGK[7] * vals[14][c];
        let mut sg = WG[3] * vals[14][c];
        for j in 0..7 {
            let pair = vals[2 * j][c] + vals[2 * j + 1][c];
            sk += WGK[j] * pair;
            if j % 2 == 1 {
                sg += WG[j / 2] * pair;
            }
        }
        k[c] = sk * h;
        g[c] = sg * h;
    }
    let err = k.iter().zip(&g).map(|(a, b)| (a - b).abs()).collect();
    (k, err)
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Vec<f64>,
    pub error: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub panels: Vec<Panel>,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn plan(&self) -> Vec<(f64, f64)> {
        self.panels.iter().map(|p| (p.a, p.b)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    /// Per-component absolute floor below which errors are not refined.
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_evaluations: usize,
    /// Panels split per refinement round.
    pub batch: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 0.0, initial_panels: 4, max_evaluations: 15 * 200, batch: 4 }
    }
}

fn totals(panels: &[Panel], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; m];
    let mut e = vec![0.0; m];
    for p in panels {
        for c in 0..m {
            v[c] += p.value[c];
            e[c] += p.error[c];
        }
    }
    (v, e)
}

fn worst_ratio(p: &Panel, scale: &[f64]) -> f64 {
    p.error
        .iter()
        .zip(scale)
        .map(|(e, s)| if *s > 0.0 { e / s } else { 0.0 })
        .fold(0.0, f64::max)
}

/// Integrate over `[a, b]`. `eval` maps a slice of abscissae to one value
/// vector per abscissa; the vector length must be constant.
pub fn integrate_adaptive<F>(eval: F, a: f64, b: f64, opts: AdaptiveOptions) -> QuadResult
where
    F: Fn(&[f64]) -> Vec<Vec<f64>>,
{
    let n0 = opts.initial_panels.max(1);
    let make = |ranges: &[(f64, f64)]| -> Vec<Panel> {
        let xs: Vec<f64> = ranges.iter().flat_map(|&(a, b)| panel_nodes(a, b)).collect();
        let vals = eval(&xs);
        ranges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let (value, error) = panel_rule(a, b, &vals[i * NODES_PER_PANEL..(i + 1) * NODES_PER_PANEL]);
                Panel { a, b, value, error }
            })
            .collect()
    };
    let h = (b - a) / n0 as f64;
    let init: Vec<(f64, f64)> = (0..n0).map(|i| (a + h * i as f64, a + h * (i + 1) as f64)).collect();
    let mut panels = make(&init);
    let mut evaluations = n0 * NODES_PER_PANEL;
    let m = panels[0].value.len();
    loop {
        let (v, e) = totals(&panels, m);
        let scale: Vec<f64> = v.iter().map(|x| (opts.rel_tol * x.abs()).max(opts.abs_tol)).collect();
        let done = e.iter().zip(&scale).all(|(err, s)| *err <= *s);
        if done || evaluations + 2 * NODES_PER_PANEL > opts.max_evaluations {
            panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
            return QuadResult { value: v, error: e, panels, evaluations, converged: done };
        }
        let mut order: Vec<(usize, f64)> =
            panels.iter().enumerate().map(|(i, p)| (i, worst_ratio(p, &scale))).collect();
        order.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
        let budget = (opts.max_evaluations - evaluations) / (2 * NODES_PER_PANEL);
        let take = opts.batch.max(1).min(budget).min(order.len());
        let mut chosen: Vec<usize> = order[..take].iter().filter(|(_, r)| *r > 1.0 / take as f64).map(|x| x.0).collect();
        if chosen.is_empty() {
            chosen.push(order[0].0);
        }
        chosen.sort_unstable();
        let mut ranges = Vec::with_capacity(2 * chosen.len());
        for &i in &chosen {
            let p = &panels[i];
            let mid = 0.5 * (p.a + p.b);
            ranges.push((p.a, mid));
            ranges.push((mid, p.b));
        }
        for &i in chosen.iter().rev() {
            panels.swap_remove(i);
        }
        panels.extend(make(&ranges));
        panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        evaluations += ranges.len() * NODES_PER_PANEL;
    }
}

/// Apply the 15-point rule on a fixed partition.
pub fn integrate_plan<F>(eval: F, plan: &[(f64, f64)]) -> QuadResult
where
    F: Fn(&[f64]) -> Vec<Vec<f64>>,
{
    let xs: Vec<f64> = plan.iter().flat_map(|&(a, b)| panel_nodes(a, b)).collect();
    let vals = eval(&xs);
    let panels: Vec<Panel> = plan
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let (value, error) = panel_rule(a, b, &vals[i * NODES_PER_PANEL..(i + 1) * NODES_PER_PANEL]);
            Panel { a, b, value, error }
        })
        .collect();
    let m = panels.first().map_or(0, |p| p.value.len());
    let (value, error) = totals(&panels, m);
    QuadResult { value, error, panels, evaluations: xs.len(), converged: true }
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> (f64, f64, bool) {
    let r = integrate_adaptive(|xs| xs.iter().map(|&x| vec![f(x)]).collect(), a, b, opts);
    (r.value[0], r.error[0], r.converged)
}

/// Map `t in (0, 1)` to `kappa = scale * t / (1 - t)` with its Jacobian.
pub fn half_line_map(scale: f64, t: f64) -> (f64, f64) {
    let u = 1.0 - t;
    (scale * t / u, scale / (u * u))
}
