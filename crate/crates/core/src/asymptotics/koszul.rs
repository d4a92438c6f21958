use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{apply_twisted, difference_generator, Projection, TailKind, TailSeries, Window};
use crate::error::{Error, Result};
use crate::ore::{Algebra, Generator, GeneratorKind, OreOperator, Rational, ShiftPolynomial};

fn require_kind(x: &Window, j: usize, kind: TailKind) -> Result<()> {
    if j >= x.arity() {
        return Err(Error::IndexOutOfRange { index: j + 1, arity: x.arity() });
    }
    if x.kind(j) != kind {
        return Err(Error::KindMismatch { direction: j + 1 });
    }
    Ok(())
}

fn with_axis(n: &[i64], j: usize, e: i64) -> Vec<i64> {
    let mut v = n.to_vec();
    v[j] = e;
    v
}

/// Solves `A_j a = g` on an ∞-type direction: `a_0 = −g_0`,
/// `a_d = τ_j a_{d−1} − g_d`. The map is bijective on the window.
pub fn case_a_solve(g: &TailSeries, j: usize) -> Result<TailSeries> {
    let w = g.window();
    require_kind(w, j, TailKind::Infinity)?;
    let mut out = TailSeries::zero(w.clone());
    for seed in w.exponents().into_iter().filter(|n| n[j] == 0) {
        let mut prev = -&g.coefficient(&seed);
        out.set(seed.clone(), prev.clone())?;
        for d in 1..=w.order(j) {
            let n = with_axis(&seed, j, -(d as i64));
            let a = &prev.shift(j, 1) - &g.coefficient(&n);
            out.set(n, a.clone())?;
            prev = a;
        }
    }
    Ok(out)
}

/// One solution of `A_j b = g` on a 0-type direction by downward recursion
/// from `b_{N+1} = 0`: `b_d = τ_j b_{d+1} − g_d`.
pub fn case_b_solve(g: &TailSeries, j: usize) -> Result<TailSeries> {
    let w = g.window();
    require_kind(w, j, TailKind::Zero)?;
    let top = w.order(j) as i64;
    let mut out = TailSeries::zero(w.clone());
    for seed in w.exponents().into_iter().filter(|n| n[j] == top) {
        let mut next = ShiftPolynomial::zero(w.arity());
        for d in (1..=top).rev() {
            let n = with_axis(&seed, j, d);
            let b = &next.shift(j, 1) - &g.coefficient(&n);
            out.set(n, b.clone())?;
            next = b;
        }
    }
    Ok(out)
}

/// Kernel representative with `b_n = τ^{(1,…,1)−n} φ` on a window of 0-type
/// directions; its coefficient at `(1,…,1)` is `φ`.
pub fn kernel_element(phi: &ShiftPolynomial, window: &Window) -> Result<TailSeries> {
    for j in 0..window.arity() {
        require_kind(window, j, TailKind::Zero)?;
    }
    extend_along_kernel(phi, window, &(0..window.arity()).collect::<Vec<_>>(), |_| phi.clone())
}

/// Extends data given at index 1 of the `axes` along the kernel of each `A_j`.
fn extend_along_kernel(
    phi: &ShiftPolynomial,
    window: &Window,
    axes: &[usize],
    seed: impl Fn(&[i64]) -> ShiftPolynomial,
) -> Result<TailSeries> {
    if phi.nvars() != window.arity() {
        return Err(Error::ArityMismatch { left: window.arity(), right: phi.nvars() });
    }
    let mut out = TailSeries::zero(window.clone());
    for n in window.exponents() {
        let mut base = n.clone();
        let mut shift = vec![0i64; window.arity()];
        for &j in axes {
            base[j] = 1;
            shift[j] = 1 - n[j];
        }
        out.set(n, seed(&base).shift_by(&shift))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InducedAction {
    /// `t_j`, expected to induce `τ_j`.
    T,
    /// The twisted Euler operator, expected to induce `−s_j`.
    Theta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Congruence {
    pub holds: bool,
    /// `w` with `A_j w = difference` on the interior.
    pub witness: TailSeries,
    /// `action·k(φ) − k(expected·φ)`.
    pub difference: TailSeries,
}

/// Checks `t_j·k(φ) ≡ k(τ_j φ)` or `θ̃_j·k(φ) ≡ k(−s_j φ)` modulo the image of
/// `A_j`, returning the case-B witness.
pub fn induced_action_congruence(
    phi: &ShiftPolynomial,
    action: InducedAction,
    j: usize,
    window: &Window,
) -> Result<Congruence> {
    let p = window.arity();
    let k = kernel_element(phi, window)?;
    let (kind, image) = match action {
        InducedAction::T => (GeneratorKind::T, phi.shift(j, 1)),
        InducedAction::Theta => (GeneratorKind::Theta, -&phi.mul_var(j)),
    };
    let op = OreOperator::generator(Algebra::D, p, Generator::new(kind, j + 1))?;
    let lhs = apply_twisted(&op, &k, Projection::Truncate)?;
    let difference = lhs.sub(&kernel_element(&image, window)?)?;
    let witness = case_b_solve(&difference, j)?;
    let back = apply_twisted(&difference_generator(p, j), &witness, Projection::Truncate)?;
    let holds = back.eq_on_interior_axis(&difference, j);
    Ok(Congruence { holds, witness, difference })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Acyclic,
    H0,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// Bijectivity on an ∞-type direction.
    A,
    /// Surjectivity with kernel transport on a 0-type direction.
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulStep {
    pub direction: usize,
    pub kind: TailKind,
    pub case: Case,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedActionRecord {
    pub direction: usize,
    pub action: InducedAction,
    pub induced: String,
    pub samples: usize,
    pub holds: bool,
    /// Union over samples of the exponents where the raw difference is nonzero.
    pub raw_difference_support: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulOptions {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub order: usize,
    pub degree_bound: u32,
    pub samples: usize,
    pub seed: u64,
}

impl KoszulOptions {
    pub fn new(i: Vec<usize>, j: Vec<usize>, order: usize) -> Self {
        KoszulOptions { i, j, order, degree_bound: 16, samples: 4, seed: 0x6b6f737a }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulReport {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub order: usize,
    pub degree_bound: u32,
    /// Directions in the complex, ascending; axis `k` of every series is `directions[k]`.
    pub directions: Vec<usize>,
    pub steps: Vec<KoszulStep>,
    pub verdict: Verdict,
    pub predicted: Verdict,
    pub matches_prediction: bool,
    /// For H0: the index whose coefficient parameterizes the kernel.
    pub extraction_index: Option<Vec<usize>>,
    pub induced_actions: Vec<InducedActionRecord>,
}

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, max_degree: u32) -> ShiftPolynomial {
    let mut exps: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..nvars {
        exps = exps
            .into_iter()
            .flat_map(|e| {
                let used: u32 = e.iter().sum();
                (0..=max_degree - used).map(move |k| {
                    let mut v = e.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    ShiftPolynomial::from_terms(
        nvars,
        exps.into_iter().map(|e| (e, Rational::from_integer(rng.gen_range(-5i64..=5).into()))),
    )
}

/// A random element of the module left after eliminating `processed`: data
/// at index 1 along those axes, extended along the kernel.
fn random_element(rng: &mut ChaCha8Rng, window: &Window, processed: &[usize], degree: u32) -> Result<TailSeries> {
    let p = window.arity();
    let seeds: std::collections::BTreeMap<Vec<i64>, ShiftPolynomial> = window
        .exponents()
        .into_iter()
        .filter(|n| processed.iter().all(|&j| n[j] == 1))
        .map(|n| {
            let b = random_poly(rng, p, degree);
            (n, b)
        })
        .collect();
    extend_along_kernel(&ShiftPolynomial::zero(p), window, processed, |base| {
        seeds.get(base).cloned().unwrap_or_else(|| ShiftPolynomial::zero(p))
    })
}

fn in_kernel_along(x: &TailSeries, axes: &[usize]) -> Result<bool> {
    let zero = TailSeries::zero(x.window().clone());
    for &k in axes {
        let y = apply_twisted(&difference_generator(x.arity(), k), x, Projection::Truncate)?;
        if !y.eq_on_interior_axis(&zero, k) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn record(name: &str, samples: usize, passed: bool) -> CheckRecord {
    CheckRecord { name: name.to_string(), samples, passed }
}

/// Eliminates the directions of `I ∪ J` from the top down: 0-type directions
/// above `max(J)` by surjectivity with kernel transport, then `max(J)` by
/// bijectivity. With `J = ∅` every direction is 0-type and the complex
/// reduces to its `H⁰`, parameterized by the coefficient at `(1,…,1)`.
pub fn koszul_reduce(opts: &KoszulOptions) -> Result<KoszulReport> {
    let iset: BTreeSet<usize> = opts.i.iter().copied().collect();
    let jset: BTreeSet<usize> = opts.j.iter().copied().collect();
    if let Some(d) = iset.intersection(&jset).next() {
        return Err(Error::InvalidInput(format!("direction {d} is in both I and J")));
    }
    if iset.contains(&0) || jset.contains(&0) {
        return Err(Error::InvalidInput("directions start at 1".into()));
    }
    if opts.order == 0 {
        return Err(Error::InvalidInput("truncation order must be positive".into()));
    }
    let directions: Vec<usize> = iset.union(&jset).copied().collect();
    let kinds = directions
        .iter()
        .map(|d| if jset.contains(d) { TailKind::Infinity } else { TailKind::Zero })
        .collect();
    let window = Window::uniform(kinds, opts.order)?.with_degree_bound(opts.degree_bound);
    let p = directions.len();
    let degree = opts.degree_bound.min(3);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let samples = opts.samples.max(1);

    let max_j_axis = jset.iter().next_back().map(|d| directions.iter().position(|x| x == d).unwrap());
    let mut processed: Vec<usize> = Vec::new();
    let mut steps = Vec::new();

    for axis in (0..p).rev() {
        if Some(axis) == max_j_axis {
            let a_op = difference_generator(p, axis);
            let (mut solve_ok, mut round_ok, mut transport_ok) = (true, true, true);
            for _ in 0..samples {
                let g = random_element(&mut rng, &window, &processed, degree)?;
                let a = case_a_solve(&g, axis)?;
                let back = apply_twisted(&a_op, &a, Projection::Truncate)?;
                solve_ok &= back.eq_on_interior_axis(&g, axis);
                transport_ok &= in_kernel_along(&a, &processed)?;
                let x = random_element(&mut rng, &window, &processed, degree)?;
                let image = apply_twisted(&a_op, &x, Projection::Truncate)?;
                round_ok &= case_a_solve(&image, axis)? == x;
            }
            let checks = vec![
                record("solve_then_apply", samples, solve_ok),
                record("apply_then_solve", samples, round_ok),
                record("kernel_transport", samples, transport_ok),
            ];
            let passed = checks.iter().all(|c| c.passed);
            steps.push(KoszulStep { direction: directions[axis], kind: TailKind::Infinity, case: Case::A, checks, passed });
            break;
        }
        let a_op = difference_generator(p, axis);
        let (mut solve_ok, mut transport_ok, mut kernel_ok) = (true, true, true);
        for _ in 0..samples {
            let g = random_element(&mut rng, &window, &processed, degree)?;
            let b = case_b_solve(&g, axis)?;
            let back = apply_twisted(&a_op, &b, Projection::Truncate)?;
            solve_ok &= back.eq_on_interior_axis(&g, axis);
            transport_ok &= in_kernel_along(&b, &processed)?;
            let mut with_axis = processed.clone();
            with_axis.push(axis);
            let k = random_element(&mut rng, &window, &with_axis, degree)?;
            kernel_ok &= in_kernel_along(&k, &with_axis)?;
        }
        let checks = vec![
            record("solve_then_apply", samples, solve_ok),
            record("kernel_transport", samples, transport_ok),
            record("kernel_extension", samples, kernel_ok),
        ];
        let passed = checks.iter().all(|c| c.passed);
        steps.push(KoszulStep { direction: directions[axis], kind: TailKind::Zero, case: Case::B, checks, passed });
        processed.push(axis);
    }

    let all_passed = steps.iter().all(|s| s.passed);
    let predicted = if jset.is_empty() { Verdict::H0 } else { Verdict::Acyclic };
    let mut induced_actions = Vec::new();
    let mut extraction_index = None;
    let verdict = if !all_passed {
        Verdict::Inconclusive
    } else if jset.is_empty() {
        let mut ok = true;
        for _ in 0..samples {
            let phi = random_poly(&mut rng, p, degree);
            let k = kernel_element(&phi, &window)?;
            ok &= k.coefficient(&vec![1; p]) == phi;
            ok &= in_kernel_along(&k, &(0..p).collect::<Vec<_>>())?;
        }
        for axis in 0..p {
            for action in [InducedAction::T, InducedAction::Theta] {
                let mut holds = true;
                let mut support = BTreeSet::new();
                for _ in 0..samples {
                    let phi = random_poly(&mut rng, p, degree);
                    let c = induced_action_congruence(&phi, action, axis, &window)?;
                    holds &= c.holds;
                    support.extend(c.difference.support());
                }
                ok &= holds;
                induced_actions.push(InducedActionRecord {
                    direction: directions[axis],
                    action,
                    induced: match action {
                        InducedAction::T => format!("tau_{}", directions[axis]),
                        InducedAction::Theta => format!("-s_{}", directions[axis]),
                    },
                    samples,
                    holds,
                    raw_difference_support: support.into_iter().collect(),
                });
            }
        }
        extraction_index = Some(vec![1; p]);
        if ok {
            Verdict::H0
        } else {
            Verdict::Inconclusive
        }
    } else {
        Verdict::Acyclic
    };

    Ok(KoszulReport {
        i: iset.into_iter().collect(),
        j: jset.into_iter().collect(),
        order: opts.order,
        degree_bound: opts.degree_bound,
        directions,
        steps,
        verdict,
        predicted,
        matches_prediction: verdict == predicted,
        extraction_index,
        induced_actions,
    })
}
