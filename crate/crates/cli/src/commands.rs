use std::f64::consts::PI;

use macrolab_core::cat::{cat_circuit_simulate, decoherence_trace, hemisphere_lg, CatModel, Detector};
use macrolab_core::chain::{chain_point, epsilon, field_propagators_with, BlockSpec, CovarianceBlock};
use macrolab_core::coarse::{
    build_povm, classical_char_fn, make_partition, mixture_condition_gap, quantum_char_fn, PartitionMode,
};
use macrolab_core::ensemble::{admixture_collective, dicke_collective};
use macrolab_core::lg::{
    classical_spin_correlation_oracle, lg_chsh, lg_wigner_from_amplitudes, parity_correlation_with,
    sampled_correlation, wigner_two_level, DichotomicObservable,
};
use macrolab_core::spin::{coherent_state, parity_operator};
use macrolab_core::undecidable::{
    decidable_randomness_audit, ghz_contradiction, AxiomSet, BooleanFn, Decidability, PauliString,
};
use macrolab_core::{Direction, RotationX, SpinLength, SpinState, Tolerances, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::args::*;
use crate::output::{Artifact, Cell, Table};
use crate::ranges::{parse_floats, parse_ints};
use crate::{CliError, CliResult};

pub fn execute(cmd: &Command, tol: &Tolerances) -> CliResult<Artifact> {
    match cmd {
        Command::LgChsh(a) => lg_chsh_cmd(a, tol),
        Command::LgWigner(a) => lg_wigner_cmd(a),
        Command::ParityViolation(a) => parity_violation(a, tol),
        Command::CoarseOverlap(a) => coarse_overlap(a),
        Command::CharFn(a) => char_fn(a),
        Command::CatLg(a) => cat_lg(a),
        Command::Decoherence(a) => decoherence(a),
        Command::CatCircuit(a) => cat_circuit(a),
        Command::ChainEpsilon(a) => chain_epsilon(a),
        Command::FieldPropagator(a) => field_propagator(a),
        Command::EnsembleDicke(a) => ensemble_dicke(a),
        Command::EnsembleSinglet(a) => ensemble_singlet(a),
        Command::EnsembleAdmixture(a) => ensemble_admixture(a),
        Command::UndecidabilityAudit(a) => undecidability_audit(a),
        Command::Ghz(_) => ghz(),
    }
}

fn floats(name: &str, s: &str) -> CliResult<Vec<f64>> {
    parse_floats(s).map_err(|e| CliError::user(format!("--{name}: {e}")))
}

fn ints(name: &str, s: &str) -> CliResult<Vec<usize>> {
    parse_ints(s).map_err(|e| CliError::user(format!("--{name}: {e}")))
}

fn spin(j: f64) -> CliResult<SpinLength> {
    Ok(SpinLength::new(j)?)
}

/// Evaluates `f` on every point in parallel, keeping the input order.
fn sweep<T: Sync, F>(points: &[T], f: F) -> CliResult<Vec<Vec<Cell>>>
where
    F: Fn(usize, &T) -> CliResult<Vec<Cell>> + Sync + Send,
{
    points.par_iter().enumerate().map(|(i, p)| f(i, p)).collect()
}

fn artifact(table: Table, summary: Vec<String>) -> Artifact {
    Artifact { table, document: None, summary }
}

fn max_by(table: &Table, col: usize) -> Option<(f64, f64)> {
    table
        .rows
        .iter()
        .filter_map(|r| match (&r[0], &r[col]) {
            (Cell::Float(x), Cell::Float(y)) if y.is_finite() => Some((*x, *y)),
            _ => None,
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

fn lg_chsh_cmd(a: &LgChsh, tol: &Tolerances) -> CliResult<Artifact> {
    let j = spin(a.j)?;
    let xs = floats("sweep-omega-dt", &a.sweep_omega_dt)?;
    let sampling = match (a.shots, a.seed) {
        (Some(0), _) => return Err(CliError::user("--shots must be positive")),
        (Some(shots), Some(seed)) => Some((shots, seed)),
        (Some(_), None) => return Err(CliError::user("--shots needs --seed")),
        (None, _) => None,
    };
    let mut cols = vec!["omega_dt", "k_quantum", "k_classical"];
    if sampling.is_some() {
        cols.push("k_sampled");
    }
    let mut table = Table::new(cols);
    let switch = tol.taylor_switch;
    let rows = sweep(&xs, |i, &x| {
        let c = |y: f64| parity_correlation_with(j, y, switch);
        let kq = 3.0 * c(x) - c(3.0 * x);
        let t = [0.0, x, 2.0 * x, 3.0 * x];
        let cl = |p: usize, q: usize| classical_spin_correlation_oracle(1.0, t[p], t[q]);
        let kc = cl(0, 1) + cl(1, 2) + cl(2, 3) - cl(0, 3);
        let mut row: Vec<Cell> = vec![x.into(), kq.into(), kc.into()];
        if let Some((shots, seed)) = sampling {
            if x <= 0.0 {
                row.push(Cell::Missing);
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let evo = RotationX { j, omega: 1.0 };
                let obs = DichotomicObservable::from_involution(&parity_operator(j))?;
                let rho = SpinState::maximally_mixed(j);
                let k = lg_chsh(|ti, tj| sampled_correlation(&rho, &evo, &obs, ti, tj, shots, &mut rng), t)?.k;
                row.push(k.into());
            }
        }
        Ok(row)
    })?;
    table.rows = rows;
    let mut summary = vec![format!("lg-chsh: j = {}, {} points", a.j, xs.len())];
    if let Some((x, k)) = max_by(&table, 1) {
        summary.push(format!("max K = {k:.6} at omega dt = {x}; violated: {}", k > 2.0));
    }
    Ok(artifact(table, summary))
}

fn lg_wigner_cmd(a: &LgWigner) -> CliResult<Artifact> {
    let xs = floats("sweep-de-dt", &a.sweep_de_dt)?;
    let mut table = Table::new(["de_dt", "k", "k_survival"]);
    table.rows = sweep(&xs, |_, &x| {
        // survival amplitude of (|0> + |1>)/sqrt 2 with level splitting dE
        let amp = |t: f64| (C64::new(1.0, 0.0) + C64::from_polar(1.0, -t)) / 2.0;
        let ks = lg_wigner_from_amplitudes(amp(x), amp(2.0 * x))?;
        Ok(vec![x.into(), wigner_two_level(x).into(), ks.into()])
    })?;
    let mut summary = vec![format!("lg-wigner: {} points", xs.len())];
    if let Some((x, k)) = max_by(&table, 1) {
        summary.push(format!("max K = {k:.6} at dE dt = {x}; bound 1"));
    }
    Ok(artifact(table, summary))
}

fn parity_violation(a: &ParityViolation, tol: &Tolerances) -> CliResult<Artifact> {
    let xs = floats("sweep-x", &a.sweep_x)?;
    let js = floats("j", &a.j)?;
    let spins = js.iter().map(|&j| spin(j)).collect::<CliResult<Vec<_>>>()?;
    let mut cols = vec!["x".to_string(), "k_analytic".to_string()];
    cols.extend(js.iter().map(|j| format!("k_j{j}")));
    let mut table = Table::new(cols);
    let switch = tol.taylor_switch;
    table.rows = sweep(&xs, |_, &x| {
        let mut row: Vec<Cell> = vec![x.into(), macrolab_core::lg::analytic_k_parity(x).into()];
        for &j in &spins {
            let dt = x / j.dim() as f64;
            let c = |y: f64| parity_correlation_with(j, y, switch);
            row.push((3.0 * c(dt) - c(3.0 * dt)).into());
        }
        Ok(row)
    })?;
    let mut summary = vec![format!("parity-violation: {} points, j = {:?}", xs.len(), js)];
    if let Some((x, k)) = max_by(&table, 1) {
        summary.push(format!("large-j max K = {k:.6} at x = {x}"));
    }
    Ok(artifact(table, summary))
}

fn coarse_overlap(a: &CoarseOverlap) -> CliResult<Artifact> {
    let js = floats("j", &a.j)?;
    let widths: Vec<Option<f64>> = match &a.delta_m {
        Some(s) => floats("delta-m", s)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let points: Vec<(f64, Option<f64>)> = js.iter().flat_map(|&j| widths.iter().map(move |&w| (j, w))).collect();
    let mut table = Table::new(["j", "delta_m", "overlap", "gap"]);
    table.rows = sweep(&points, |_, &(j, w)| {
        let sj = spin(j)?;
        let part = match w {
            Some(dm) => make_partition(sj, dm, PartitionMode::Aligned)?,
            None => make_partition(sj, 1.0, PartitionMode::Hemispheres)?,
        };
        let eq = coherent_state(sj, &Direction::new(PI / 2.0, PI)?);
        let gap = mixture_condition_gap(&eq, &build_povm(&part))?;
        let dm: Cell = w.map_or_else(|| "hemispheres".into(), Cell::from);
        Ok(vec![j.into(), dm, (1.0 - gap).into(), gap.into()])
    })?;
    let summary = vec![format!("coarse-overlap: {} points (equatorial coherent state)", points.len())];
    Ok(artifact(table, summary))
}

fn char_fn(a: &CharFn) -> CliResult<Artifact> {
    let j = spin(a.j)?;
    let scales = floats("scale", &a.scale)?;
    let thetas = floats("sweep-theta", &a.sweep_theta)?;
    let points: Vec<(f64, f64)> = scales.iter().flat_map(|&c| thetas.iter().map(move |&t| (c, t))).collect();
    let mut table = Table::new(["scale", "theta", "xi", "quantum", "classical", "abs_diff"]);
    table.rows = sweep(&points, |_, &(c, th)| {
        let xi = c / a.j.sqrt();
        let q = quantum_char_fn(j, xi, xi, th);
        let cl = classical_char_fn(j, xi, xi, th);
        Ok(vec![c.into(), th.into(), xi.into(), q.into(), cl.into(), (q - cl).abs().into()])
    })?;
    let worst = table.rows.iter().filter_map(|r| if let Cell::Float(d) = r[5] { Some(d) } else { None }).fold(0.0, f64::max);
    let summary = vec![format!("char-fn: j = {}, {} points, max |quantum - classical| = {worst:.3e}", a.j, points.len())];
    Ok(artifact(table, summary))
}

fn cat_lg(a: &CatLg) -> CliResult<Artifact> {
    let model = CatModel { j: spin(a.j)?, omega: a.omega };
    if !(a.omega > 0.0 && a.omega.is_finite()) {
        return Err(CliError::user("--omega must be positive"));
    }
    let xs = floats("sweep-omega-dt", &a.sweep_omega_dt)?;
    let detector = match a.detector {
        DetectorArg::Povm => Detector::Povm,
        DetectorArg::VonNeumann => Detector::VonNeumann,
    };
    let mut table = Table::new(["omega_dt", "k", "bound", "violated"]);
    table.rows = sweep(&xs, |_, &x| {
        let dt = x / a.omega;
        let times: Vec<f64> = (0..a.times).map(|i| i as f64 * dt).collect();
        let r = hemisphere_lg(&model, &times, detector)?;
        Ok(vec![x.into(), r.k.into(), r.bound.into(), r.violated.into()])
    })?;
    let violated = table.rows.iter().filter(|r| r[3] == Cell::Bool(true)).count();
    let mut summary = vec![format!("cat-lg: j = {}, {}-time form, {violated}/{} points violate", a.j, a.times, xs.len())];
    if let Some((x, k)) = max_by(&table, 1) {
        summary.push(format!("max K = {k:.6} at omega dt = {x}"));
    }
    Ok(artifact(table, summary))
}

fn decoherence(a: &Decoherence) -> CliResult<Artifact> {
    let model = CatModel { j: spin(a.j)?, omega: a.omega };
    let tr = decoherence_trace(&model, a.dt, a.steps)?;
    let mut table = Table::new(["n", "t", "a_n", "cos2", "fitted"]);
    for (n, &an) in tr.survival.iter().enumerate() {
        let t = n as f64 * a.dt;
        table.push(vec![n.into(), t.into(), an.into(), (a.omega * t).cos().powi(2).into(), tr.fitted(t).into()]);
    }
    let summary = vec![format!("decoherence: a = cos^2(omega dt) = {:.6}, nu = {:.6}, regime {:?}", tr.a, tr.nu, tr.regime)];
    Ok(artifact(table, summary))
}

fn cat_circuit(a: &CatCircuit) -> CliResult<Artifact> {
    let ks = ints("intervals", &a.intervals)?;
    let mut table = Table::new(["intervals", "angle", "all_up", "all_down", "residual", "rotations", "cnots"]);
    table.rows = sweep(&ks, |_, &k| {
        let r = cat_circuit_simulate(a.qubits, a.omega_dt, k)?;
        Ok(vec![
            k.into(),
            (k as f64 * a.omega_dt).into(),
            r.all_up.into(),
            r.all_down.into(),
            r.residual.into(),
            r.rotations.into(),
            r.cnots.into(),
        ])
    })?;
    let summary = vec![format!("cat-circuit: {} qubits, omega dt = {}, {} rows", a.qubits, a.omega_dt, ks.len())];
    Ok(artifact(table, summary))
}

fn chain_epsilon(a: &ChainEpsilon) -> CliResult<Artifact> {
    let ns = ints("n", &a.n)?;
    let ds = ints("d", &a.d)?;
    let mut specs = Vec::new();
    for &d in &ds {
        match &a.s {
            None => {
                for &n in &ns {
                    specs.push(BlockSpec::contiguous(n, d)?);
                }
            }
            Some(s) => {
                for s in ints("s", s)? {
                    for &n in &ns {
                        if s > 0 && n % s == 0 {
                            specs.push(BlockSpec::new(s, n / s, d)?);
                        }
                    }
                }
            }
        }
    }
    if specs.is_empty() {
        return Err(CliError::user("no block size n is a multiple of any subblock size s"));
    }
    let mut table = Table::new(["alpha", "n", "m", "s", "d", "epsilon", "duan"]);
    table.rows = sweep(&specs, |_, spec| {
        let p = chain_point(a.alpha, spec)?;
        Ok(vec![p.alpha.into(), p.n.into(), p.m.into(), p.s.into(), p.d.into(), p.epsilon.into(), p.duan.into()])
    })?;
    let entangled = table.rows.iter().filter(|r| matches!(r[5], Cell::Float(e) if e > 0.0)).count();
    let summary = vec![format!("chain-epsilon: alpha = {}, {entangled}/{} geometries entangled", a.alpha, specs.len())];
    Ok(artifact(table, summary))
}

fn field_propagator(a: &FieldPropagator) -> CliResult<Artifact> {
    let masses = floats("mass", &a.mass)?;
    let ls = floats("l", &a.l)?;
    let rs = floats("r-over-l", &a.r_over_l)?;
    if !(a.cutoff_periods > 0.0) {
        return Err(CliError::user("--cutoff-periods must be positive"));
    }
    let mut points = Vec::new();
    for &m in &masses {
        for &l in &ls {
            for &r in &rs {
                points.push((m, l, r));
            }
        }
    }
    let mut table = Table::new(["mass", "l", "r_over_l", "d_phi", "d_pi", "epsilon"]);
    table.rows = sweep(&points, |_, &(m, l, r)| {
        let cutoff = a.cutoff_periods * 2.0 * PI / l;
        let (g, h) = field_propagators_with(m, l, 0.0, cutoff)?;
        let (g_ab, h_ab) = field_propagators_with(m, l, r * l, cutoff)?;
        let eps = epsilon(&CovarianceBlock::canonical(g, h, g_ab, h_ab))?;
        Ok(vec![m.into(), l.into(), r.into(), g_ab.into(), h_ab.into(), eps.into()])
    })?;
    let summary = vec![format!("field-propagator: {} points, cutoff {} x 2 pi / L", points.len(), a.cutoff_periods)];
    Ok(artifact(table, summary))
}

fn ensemble_dicke(a: &EnsembleDicke) -> CliResult<Artifact> {
    let totals = ints("N", &a.n_total)?;
    let mut table = Table::new(["N", "k", "n", "e_ab"]);
    table.rows = sweep(&totals, |_, &n_total| {
        let (_, e) = dicke_collective(n_total, a.k, a.block)?;
        Ok(vec![n_total.into(), a.k.into(), a.block.into(), e.into()])
    })?;
    let summary = vec![format!("ensemble-dicke: k = {}, block n = {}, {} rows", a.k, a.block, totals.len())];
    Ok(artifact(table, summary))
}

fn ensemble_singlet(a: &EnsembleSinglet) -> CliResult<Artifact> {
    let ns = ints("n", &a.n)?;
    let ps = floats("p", &a.p)?;
    let points: Vec<(usize, f64)> = ns.iter().flat_map(|&n| ps.iter().map(move |&p| (n, p))).collect();
    let mut table = Table::new(["n", "s", "p", "e_ab"]);
    table.rows = sweep(&points, |_, &(n, p)| {
        let (e, _) = admixture_collective(n, p)?;
        Ok(vec![n.into(), (n as f64 / 2.0).into(), p.into(), e.into()])
    })?;
    let summary = vec![format!("ensemble-singlet: {} points", points.len())];
    Ok(artifact(table, summary))
}

/// Block sizes scanned for the first vanishing `E_ab`.
const ADMIXTURE_SCAN: usize = 100_000;

fn ensemble_admixture(a: &EnsembleAdmixture) -> CliResult<Artifact> {
    let ps = floats("p", &a.p)?;
    let mut table = Table::new(["p", "n_c", "first_zero_n"]);
    table.rows = sweep(&ps, |_, &p| {
        let (_, nc) = admixture_collective(1, p)?;
        let mut first = None;
        for n in 1..=ADMIXTURE_SCAN {
            if admixture_collective(n, p)?.0 <= 0.0 {
                first = Some(n);
                break;
            }
        }
        Ok(vec![p.into(), nc.into(), first.into()])
    })?;
    let summary = vec![format!("ensemble-admixture: {} weights; empty n_c means unbounded", ps.len())];
    Ok(artifact(table, summary))
}

fn parse_bits(s: &str) -> CliResult<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::user(format!("--bits: {s:?} is not a 0/1 string"))),
        })
        .collect()
}

fn parse_functions(s: &str) -> CliResult<Vec<BooleanFn>> {
    s.split(',')
        .map(|f| match f.trim() {
            "y0" => Ok(BooleanFn::y(0)),
            "y1" => Ok(BooleanFn::y(1)),
            "y2" => Ok(BooleanFn::y(2)),
            "y3" => Ok(BooleanFn::y(3)),
            other => Err(CliError::user(format!("--functions: unknown function {other:?}, expected y0..y3"))),
        })
        .collect()
}

fn named_rows(name: &str, n: usize) -> CliResult<Option<Vec<String>>> {
    let rows = match name {
        "z" => (0..n).map(|q| single(n, q, 'Z')).collect(),
        "x" => (0..n).map(|q| single(n, q, 'X')).collect(),
        "bell" | "ghz" => {
            if name == "bell" && n != 2 {
                return Err(CliError::user("--axioms bell needs --N 2"));
            }
            let mut rows = vec!["X".repeat(n)];
            rows.extend((0..n - 1).map(|q| {
                let mut s = vec!['I'; n];
                s[q] = 'Z';
                s[q + 1] = 'Z';
                s.into_iter().collect()
            }));
            rows
        }
        _ => return Ok(None),
    };
    Ok(Some(rows))
}

fn single(n: usize, q: usize, p: char) -> String {
    (0..n).map(|i| if i == q { p } else { 'I' }).collect()
}

fn undecidability_audit(a: &UndecidabilityAudit) -> CliResult<Artifact> {
    let seed = a.seed.ok_or_else(|| CliError::user("--seed is required for sampling"))?;
    if a.n == 0 {
        return Err(CliError::user("--N must be at least 1"));
    }
    if a.shots == 0 {
        return Err(CliError::user("--shots must be positive"));
    }
    let rows: Vec<PauliString> = if a.axioms == "random" {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        AxiomSet::random(a.n, &mut rng)?.rows().to_vec()
    } else {
        let labels = match named_rows(&a.axioms, a.n)? {
            Some(rows) => rows,
            None => a.axioms.split(',').map(|l| l.trim().to_string()).collect(),
        };
        labels.iter().map(|l| PauliString::from_label(l)).collect::<Result<_, _>>()?
    };
    let axioms = match (&a.functions, &a.bits) {
        (Some(_), Some(_)) => return Err(CliError::user("--functions and --bits are exclusive")),
        (Some(f), None) => {
            let fns = parse_functions(f)?;
            if fns.len() != a.n {
                return Err(CliError::user(format!("--functions needs {} entries, got {}", a.n, fns.len())));
            }
            AxiomSet::encoded_by(rows, &fns)?
        }
        (None, Some(b)) => AxiomSet::new(rows, parse_bits(b)?)?,
        (None, None) => {
            let k = rows.len();
            AxiomSet::new(rows, vec![false; k])?
        }
    };
    let audit = decidable_randomness_audit(&axioms, a.shots, seed)?;
    let mut table = Table::new([
        "theta", "status", "k", "sign", "p_plus", "count_plus", "count_minus", "deterministic", "uniform", "consistent",
    ]);
    for e in &audit.entries {
        let (status, k, sign): (&str, Cell, Cell) = match &e.decidability {
            Decidability::Decidable { k, sign, .. } => {
                let ks: String = k.iter().map(|&b| if b { '1' } else { '0' }).collect();
                ("decidable", ks.into(), Cell::Int(*sign as i64))
            }
            Decidability::Undecidable => ("undecidable", Cell::Missing, Cell::Missing),
        };
        let m = &e.measurement;
        table.push(vec![
            e.theta.label().into(),
            status.into(),
            k,
            sign,
            m.p_plus.into(),
            (m.counts[0] as usize).into(),
            (m.counts[1] as usize).into(),
            m.deterministic.into(),
            e.uniform.into(),
            e.consistent.into(),
        ]);
    }
    let summary = vec![
        format!("undecidability-audit: {} qubits, {} strings, {} shots, seed {seed}", audit.n_qubits, audit.entries.len(), a.shots),
        format!(
            "decidable {}, deterministic {}, uniform {}, consistent: {}",
            audit.decidable, audit.deterministic, audit.uniform, audit.all_consistent
        ),
    ];
    let document = serde_json::to_value(&audit).map_err(|e| CliError::internal(e.to_string()))?;
    Ok(Artifact { table, document: Some(document), summary })
}

fn ghz() -> CliResult<Artifact> {
    let r = ghz_contradiction()?;
    let mut table = Table::new(["quantity", "value"]);
    for (p, (prop, v)) in r.axioms.iter().zip(r.axiom_propositions.iter().zip(&r.axiom_values)) {
        table.push(vec![format!("axiom {p}").into(), prop.clone().into()]);
        table.push(vec![format!("<{p}>").into(), (*v).into()]);
    }
    table.push(vec!["product sign".into(), Cell::Int(r.product_sign as i64)]);
    table.push(vec!["logical".into(), r.logical_proposition.clone().into()]);
    table.push(vec![format!("<{}>", r.target).into(), r.quantum_value.into()]);
    table.push(vec!["quantum".into(), r.quantum_proposition.clone().into()]);
    table.push(vec!["contradiction".into(), r.contradiction.into()]);
    let mut summary = vec!["ghz: three-qubit GHZ state".to_string()];
    for (p, prop) in r.axioms.iter().zip(&r.axiom_propositions) {
        summary.push(format!("  {p}: {prop}"));
    }
    summary.push(format!("  product of axioms = {} {}", if r.product_sign < 0 { "-" } else { "+" }, r.target));
    summary.push(format!("  logic predicts   {}", r.logical_proposition));
    summary.push(format!("  quantum value {:+.0} gives {}", r.quantum_value, r.quantum_proposition));
    summary.push(format!("  contradiction: {}", r.contradiction));
    let document = serde_json::to_value(&r).map_err(|e| CliError::internal(e.to_string()))?;
    Ok(Artifact { table, document: Some(document), summary })
}
