//! Suite runner: deterministic execution of the named verification suites
//! over one algebra, with a structured JSON/text report.
//!
//! Suites run in dependency order (model → chart → heisenberg → build →
//! q-solve → eigenvalues → lowest-weight → symbol → family → commutativity
//! → gram). When a prerequisite construction fails, its dependent suites are
//! reported as skipped rather than run or panicked. Identical configuration
//! and seed produce byte-identical JSON (timings are reported as 0 unless
//! explicitly enabled).

use crate::chart::{random_orbit_point, Chart};
use crate::diffop::DiffOp;
use crate::exotic::{
    self, all_pairs, eigenvalue_closed_form, gamma_polynomial, generate_family, psi_powers,
    CorrectionPoly, ExoticFamily,
};
use crate::inner::{
    chart_expand, conjugate_expr, constant_term, gram_csv, gram_matrix, lift_apply, pairing, Expr,
};
use crate::lie::{build_algebra, closed_form_p, compute_p, AlgebraSpec, Family, LieElement};
use crate::poly::Poly;
use crate::rat::{fmt_rat, rat, rat_int, Rat};
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Build(#[from] crate::lie::LieError),
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("{0}")]
    Build(#[from] crate::lie::LieError),
    #[error("unknown dump object `{0}` (expected D0, A, B, C, S, f_psi, or gram:<p>)")]
    UnknownObject(String),
    #[error("object `{0}` is not constructible for this configuration: {1}")]
    NotConstructible(String, String),
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Model,
    Chart,
    Heisenberg,
    Build,
    QSolve,
    Eigenvalues,
    LowestWeight,
    Symbol,
    Family,
    Commutativity,
    Gram,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Model,
        Suite::Chart,
        Suite::Heisenberg,
        Suite::Build,
        Suite::QSolve,
        Suite::Eigenvalues,
        Suite::LowestWeight,
        Suite::Symbol,
        Suite::Family,
        Suite::Commutativity,
        Suite::Gram,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Model => "model",
            Suite::Chart => "chart",
            Suite::Heisenberg => "heisenberg",
            Suite::Build => "build",
            Suite::QSolve => "q-solve",
            Suite::Eigenvalues => "eigenvalues",
            Suite::LowestWeight => "lowest-weight",
            Suite::Symbol => "symbol",
            Suite::Family => "family",
            Suite::Commutativity => "commutativity",
            Suite::Gram => "gram",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|x| x.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSampling {
    All,
    Count(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub family: Family,
    pub n: usize,
    pub suites: Vec<Suite>,
    pub k_max: u32,
    pub gram_degree_max: usize,
    pub seed: u64,
    pub pair_sampling: PairSampling,
}

impl SuiteConfig {
    /// Defaults: every suite, k_max 8, Gram degrees up to 2, seed 0xC0FFEE,
    /// all commutator pairs.
    pub fn new(family: Family, n: usize) -> Self {
        SuiteConfig {
            family,
            n,
            suites: Suite::ALL.to_vec(),
            k_max: 8,
            gram_degree_max: 2,
            seed: 0xC0FFEE,
            pair_sampling: PairSampling::All,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub description: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub status: Status,
    pub wall_ms: u64,
    pub checks: Vec<CheckReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub dim_g: usize,
    pub dim_orbit: usize,
    pub engine_version: String,
    pub config: SuiteConfig,
    pub suites: Vec<SuiteReport>,
    pub overall: Status,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{}({}): dim g = {}, m = {}, dim orbit = {}\n",
            self.family, self.n, self.dim_g, self.m, self.dim_orbit
        ));
        for s in &self.suites {
            out.push_str(&format!(
                "[{}] {}  ({} ms)\n",
                status_str(s.status),
                s.name,
                s.wall_ms
            ));
            for c in &s.checks {
                out.push_str(&format!(
                    "  [{}] {}: {}\n",
                    status_str(c.status),
                    c.id,
                    c.description
                ));
                if let Some(w) = &c.witness {
                    out.push_str(&format!("        witness: {w}\n"));
                }
            }
        }
        out.push_str(&format!("overall: {}\n", status_str(self.overall)));
        out
    }

    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    /// The eigenvalue sequence recovered from the report is not stored; use
    /// the library API for cross-model comparisons.
    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Skipped => "skip",
    }
}

struct SuiteRun {
    name: &'static str,
    checks: Vec<CheckReport>,
    started: Instant,
}

impl SuiteRun {
    fn new(name: &'static str) -> Self {
        SuiteRun {
            name,
            checks: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, id: &str, description: &str, outcome: Result<(), String>) {
        let (status, witness) = match outcome {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(truncate(w, 600))),
        };
        self.checks.push(CheckReport {
            id: id.to_string(),
            description: description.to_string(),
            status,
            witness,
        });
    }

    fn finish(self, timings: bool) -> SuiteReport {
        let status = if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        };
        SuiteReport {
            name: self.name.to_string(),
            status,
            wall_ms: if timings {
                self.started.elapsed().as_millis() as u64
            } else {
                0
            },
            checks: self.checks,
        }
    }
}

fn truncate(s: String, max: usize) -> String {
    if s.len() <= max {
        s
    } else {
        let mut t: String = s.chars().take(max).collect();
        t.push('…');
        t
    }
}

fn ok_if(cond: bool, witness: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

fn skipped_suite(name: &'static str, reason: &str) -> SuiteReport {
    SuiteReport {
        name: name.to_string(),
        status: Status::Skipped,
        wall_ms: 0,
        checks: vec![CheckReport {
            id: format!("{name}/prerequisite"),
            description: format!("skipped: {reason}"),
            status: Status::Skipped,
            witness: None,
        }],
    }
}

/// Execute the configured suites and assemble the report.
pub fn run(cfg: &SuiteConfig, timings: bool) -> Result<VerificationReport, RunError> {
    let spec = build_algebra(cfg.family, cfg.n)?;
    let m = spec.m;
    let dim = spec.dim;
    let dim_orbit = spec.dim_orbit();

    let mut suites: Vec<SuiteReport> = Vec::new();
    let want = |s: Suite| cfg.suites.contains(&s);
    let dependents = [
        Suite::QSolve,
        Suite::Eigenvalues,
        Suite::LowestWeight,
        Suite::Symbol,
        Suite::Family,
        Suite::Commutativity,
        Suite::Gram,
    ];

    if want(Suite::Model) {
        suites.push(model_suite(&spec, timings));
    }

    let chart_needed = want(Suite::Chart)
        || want(Suite::Heisenberg)
        || want(Suite::Build)
        || dependents.iter().any(|&s| want(s));
    let mut skip_reason: Option<String> = None;
    let mut engine: Option<exotic::Engine> = None;

    if chart_needed {
        match Chart::new(spec.clone()) {
            Err(e) => {
                if want(Suite::Chart) {
                    let mut r = SuiteRun::new("chart");
                    r.check("chart/build", "chart construction", Err(e.to_string()));
                    suites.push(r.finish(timings));
                }
                skip_reason = Some(e.to_string());
            }
            Ok(chart) => {
                if want(Suite::Chart) {
                    suites.push(chart_suite(&chart, cfg, timings));
                }
                if want(Suite::Heisenberg) {
                    suites.push(heisenberg_suite(&chart, timings));
                }
                if want(Suite::Build) {
                    suites.push(build_suite(&chart, cfg, timings));
                }
                if dependents.iter().any(|&s| want(s)) {
                    match exotic::Engine::build(chart) {
                        Ok(e) => engine = Some(e),
                        Err(e) => skip_reason = Some(e.to_string()),
                    }
                }
            }
        }
    }

    let mut family_ops: Option<ExoticFamily> = None;
    let mut family_err: Option<String> = None;
    if let Some(eng) = &engine {
        if want(Suite::QSolve) {
            suites.push(q_solve_suite(eng, timings));
        }
        if want(Suite::Eigenvalues) {
            suites.push(eigenvalue_suite(eng, cfg, timings));
        }
        if want(Suite::LowestWeight) {
            suites.push(lowest_weight_suite(eng, cfg, timings));
        }
        if want(Suite::Symbol) {
            suites.push(symbol_suite(eng, timings));
        }
        if want(Suite::Family) || want(Suite::Commutativity) || want(Suite::Gram) {
            match generate_family(&eng.chart, &eng.d0) {
                Ok(f) => family_ops = Some(f),
                Err(e) => family_err = Some(e.to_string()),
            }
        }
        if want(Suite::Family) {
            suites.push(family_suite(eng, &family_ops, &family_err, cfg, timings));
        }
        match &family_ops {
            Some(fam) => {
                if want(Suite::Commutativity) {
                    suites.push(commutativity_suite(eng, fam, cfg, timings));
                }
                if want(Suite::Gram) {
                    suites.push(gram_suite(eng, fam, cfg, timings));
                }
            }
            None => {
                let reason = family_err.as_deref().unwrap_or("family not generated");
                if want(Suite::Commutativity) {
                    suites.push(skipped_suite("commutativity", reason));
                }
                if want(Suite::Gram) {
                    suites.push(skipped_suite("gram", reason));
                }
            }
        }
    } else if let Some(reason) = &skip_reason {
        for s in dependents {
            if want(s) {
                suites.push(skipped_suite(s.name_static(), reason));
            }
        }
    }

    let overall = if suites.iter().all(|s| s.status == Status::Pass) {
        Status::Pass
    } else {
        Status::Fail
    };

    Ok(VerificationReport {
        schema: "orbit-weyl/1".to_string(),
        family: cfg.family,
        n: cfg.n,
        m,
        dim_g: dim,
        dim_orbit,
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        suites,
        overall,
    })
}

impl Suite {
    fn name_static(&self) -> &'static str {
        self.name()
    }
}

// ---------------------------------------------------------------------------
// individual suites
// ---------------------------------------------------------------------------

fn model_suite(spec: &AlgebraSpec, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("model");
    let dim = spec.dim;
    let e = |i: usize| spec.basis_elem(i);
    let br = |x: &LieElement, y: &LieElement| spec.bracket(x, y).unwrap();

    let mut bad = None;
    'jac: for i in 0..dim {
        for j in (i + 1)..dim {
            for k in (j + 1)..dim {
                let s = br(&e(i), &br(&e(j), &e(k)))
                    .add(&br(&e(j), &br(&e(k), &e(i))))
                    .add(&br(&e(k), &br(&e(i), &e(j))));
                if !s.is_zero() {
                    bad = Some((i, j, k));
                    break 'jac;
                }
            }
        }
    }
    run.check(
        "model/jacobi",
        "Jacobi identity over all basis triples",
        ok_if(bad.is_none(), || {
            let (i, j, k) = bad.unwrap();
            format!(
                "fails at ({}, {}, {})",
                spec.names[i], spec.names[j], spec.names[k]
            )
        }),
    );

    let mut bad = None;
    'inv: for i in 0..dim {
        for j in 0..dim {
            if spec.killing(&e(i), &e(j)).unwrap() != spec.killing(&e(j), &e(i)).unwrap() {
                bad = Some((i, j, 0, "symmetry"));
                break 'inv;
            }
            for k in 0..dim {
                let lhs = spec.killing(&br(&e(i), &e(j)), &e(k)).unwrap();
                let rhs = spec.killing(&e(i), &br(&e(j), &e(k))).unwrap();
                if lhs != rhs {
                    bad = Some((i, j, k, "invariance"));
                    break 'inv;
                }
            }
        }
    }
    run.check(
        "model/killing-invariant",
        "normalized form symmetric and invariant: ([x,y],z) = (x,[y,z])",
        ok_if(bad.is_none(), || {
            let (i, j, k, what) = bad.unwrap();
            format!("{what} fails at ({i}, {j}, {k})")
        }),
    );

    let mut bad = None;
    for i in 0..dim {
        let got = br(&spec.h, &e(i));
        let want = e(i).scale(&rat_int(spec.grading[i].into()));
        if got != want || spec.grading[i].abs() > 2 {
            bad = Some(i);
            break;
        }
    }
    run.check(
        "model/grading-diagonal",
        "ad h is diagonal on the basis with eigenvalues in {-2..2}",
        ok_if(bad.is_none(), || {
            format!("fails at {}", spec.names[bad.unwrap()])
        }),
    );

    let mut bad = None;
    'grad: for i in 0..dim {
        for j in 0..dim {
            let target = i32::from(spec.grading[i]) + i32::from(spec.grading[j]);
            for (k, c) in spec.bracket_basis(i, j) {
                if !c.is_zero() && i32::from(spec.grading[*k]) != target {
                    bad = Some((i, j));
                    break 'grad;
                }
            }
        }
    }
    run.check(
        "model/grading-bracket",
        "[g_i, g_j] lands in g_{i+j}",
        ok_if(bad.is_none(), || format!("fails at {:?}", bad.unwrap())),
    );

    let mut bad = None;
    'sig: for i in 0..dim {
        if spec.sigma(&spec.sigma(&e(i)).unwrap()).unwrap() != e(i) {
            bad = Some((i, 0));
            break;
        }
        for j in 0..dim {
            let lhs = spec.sigma(&br(&e(i), &e(j))).unwrap();
            let rhs = br(&spec.sigma(&e(i)).unwrap(), &spec.sigma(&e(j)).unwrap());
            if lhs != rhs {
                bad = Some((i, j));
                break 'sig;
            }
        }
    }
    run.check(
        "model/sigma-involution",
        "sigma is an involutive automorphism on the basis",
        ok_if(bad.is_none(), || format!("fails at {:?}", bad.unwrap())),
    );

    run.check(
        "model/triple",
        "[h,x_psi]=2x_psi, [h,x0]=-2x0, [x_psi,x0]=h, (x_psi,x0)=1/2, sigma(x_psi)=-x0",
        (|| -> Result<(), String> {
            ok_if(
                br(&spec.h, &spec.x_psi) == spec.x_psi.scale(&rat_int(2)),
                || "[h, x_psi] != 2 x_psi".to_string(),
            )?;
            ok_if(br(&spec.h, &spec.x0) == spec.x0.scale(&rat_int(-2)), || {
                "[h, x0] != -2 x0".to_string()
            })?;
            ok_if(br(&spec.x_psi, &spec.x0) == spec.h, || {
                "[x_psi, x0] != h".to_string()
            })?;
            ok_if(
                spec.killing(&spec.x_psi, &spec.x0).unwrap() == rat(1, 2),
                || "(x_psi, x0) != 1/2".to_string(),
            )?;
            ok_if(
                spec.sigma(&spec.x_psi).unwrap() == spec.x0.scale(&rat_int(-1)),
                || "sigma(x_psi) != -x0".to_string(),
            )
        })(),
    );

    run.check(
        "model/coordinate-pairs",
        "[x'_j, x_k] = delta_jk x0 and (x|x) = 1/2 on the coordinate pairs",
        (|| -> Result<(), String> {
            for j in 1..=spec.m {
                for k in 1..=spec.m {
                    let want = if j == k {
                        spec.x0.clone()
                    } else {
                        LieElement::zero(spec.key(), dim)
                    };
                    ok_if(
                        br(&spec.coord_elems[2 * j + 1], &spec.coord_elems[2 * k]) == want,
                        || format!("[x'_{j}, x_{k}] wrong"),
                    )?;
                }
                for elem in [&spec.coord_elems[2 * j], &spec.coord_elems[2 * j + 1]] {
                    let s = spec.sigma(elem).unwrap();
                    ok_if(-spec.killing(elem, &s).unwrap() == rat(1, 2), || {
                        format!("(x|x) != 1/2 on pair {j}")
                    })?;
                }
            }
            Ok(())
        })(),
    );

    run.check(
        "model/p-closed-form",
        "quartic from four bracket applications matches the closed form, and P(0) = 0",
        match compute_p(spec) {
            Ok(p) => {
                let want = closed_form_p(spec);
                ok_if(p == want, || {
                    let names = crate::lie::w_names(spec.m);
                    format!(
                        "computed {} vs closed {}",
                        p.to_text(&names),
                        want.to_text(&names)
                    )
                })
                .and_then(|()| {
                    let zeros = vec![Rat::zero(); 2 * spec.m];
                    ok_if(p.eval(&zeros).unwrap().is_zero(), || "P(0) != 0".to_string())
                })
            }
            Err(e) => Err(e.to_string()),
        },
    );

    run.check(
        "model/tangent-dim",
        "rank of y -> [y, x_psi] equals the orbit dimension 2m+2",
        {
            let got = spec.tangent_dim();
            ok_if(got == spec.dim_orbit(), || {
                format!("rank {got}, expected {}", spec.dim_orbit())
            })
        },
    );

    run.check("model/heisenberg-count", "g_neg has 2m+1 basis elements", {
        let got = spec.g_neg_indices().len();
        ok_if(got == 2 * spec.m + 1, || format!("{got} elements"))
    });

    run.finish(timings)
}

fn chart_suite(chart: &Chart, cfg: &SuiteConfig, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("chart");
    let spec = &chart.spec;
    let dim = spec.dim;

    run.check(
        "chart/coordinates",
        "coordinate elements reproduce their chart variables",
        (|| -> Result<(), String> {
            for (k, elem) in spec.coord_elems.iter().enumerate() {
                ok_if(chart.orbit_function(elem) == chart.vars.var(k), || {
                    format!("coordinate {k}")
                })?;
            }
            Ok(())
        })(),
    );

    run.check(
        "chart/euler-degree-1",
        "every basis orbit function is Euler-homogeneous of degree 1",
        (|| -> Result<(), String> {
            let w = chart.vars.euler_weights();
            for i in 0..dim {
                let f = chart.orbit_function(&spec.basis_elem(i));
                ok_if(f.homogeneous_degree(&w) == Some(1), || spec.names[i].clone())?;
            }
            Ok(())
        })(),
    );

    let etas: Vec<DiffOp> = (0..dim)
        .map(|i| chart.eta_field(&spec.basis_elem(i)))
        .collect();

    run.check(
        "chart/eta-lie-homomorphism",
        "[eta^x, eta^y] = eta^[x,y] over all basis pairs",
        (|| -> Result<(), String> {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let lhs = etas[i].commutator(&etas[j]);
                    let b = spec
                        .bracket(&spec.basis_elem(i), &spec.basis_elem(j))
                        .unwrap();
                    ok_if(lhs == chart.eta_field(&b), || {
                        format!("pair ({}, {})", spec.names[i], spec.names[j])
                    })?;
                }
            }
            Ok(())
        })(),
    );

    run.check(
        "chart/equivariance",
        "eta^x(f_y) = f_[x,y] over all basis pairs",
        (|| -> Result<(), String> {
            for i in 0..dim {
                for j in 0..dim {
                    let lhs = etas[i].apply(&chart.orbit_function(&spec.basis_elem(j)));
                    let rhs = chart.orbit_function(
                        &spec
                            .bracket(&spec.basis_elem(i), &spec.basis_elem(j))
                            .unwrap(),
                    );
                    ok_if(lhs == rhs, || {
                        format!("pair ({}, {})", spec.names[i], spec.names[j])
                    })?;
                }
            }
            Ok(())
        })(),
    );

    run.check(
        "chart/f-psi-from-quartic",
        "f_psi equals P(f_1..fp_m)/f0^3 - fp0^2/(4 f0)",
        (|| -> Result<(), String> {
            let p = compute_p(spec).map_err(|e| e.to_string())?;
            let vars = &chart.vars;
            let mut args = Vec::with_capacity(2 * spec.m);
            for j in 1..=spec.m {
                args.push(vars.var(vars.f(j)));
                args.push(vars.var(vars.fp(j)));
            }
            let expect = p.substitute(&args).mul(&vars.f0_pow(-3)).sub(
                &vars
                    .var(1)
                    .mul(&vars.var(1))
                    .mul(&vars.f0_pow(-1))
                    .scale(&rat(1, 4)),
            );
            ok_if(chart.f_psi == expect, || {
                format!("f_psi = {}", chart.f_psi.to_text(&vars.names()))
            })
        })(),
    );

    run.check(
        "chart/delta-commutes-g-neg",
        "delta fields commute with eta^z for every basis z in g_neg",
        (|| -> Result<(), String> {
            for &zi in &spec.g_neg_indices() {
                for j in 1..=spec.m {
                    for primed in [false, true] {
                        ok_if(
                            etas[zi].commutator(chart.delta_field(j, primed)).is_zero(),
                            || format!("z = {}, pair {j}", spec.names[zi]),
                        )?;
                    }
                }
            }
            Ok(())
        })(),
    );

    run.check(
        "chart/euler-on-coordinates",
        "E(f_c) = f_c on every chart coordinate",
        (|| -> Result<(), String> {
            for k in 0..chart.vars.nvars() {
                let v = chart.vars.var(k);
                ok_if(chart.euler.apply(&v) == v, || format!("coordinate {k}"))?;
            }
            Ok(())
        })(),
    );

    run.check(
        "chart/random-orbit-points",
        "chart expressions match direct pairings at 100 random rational orbit points",
        (|| -> Result<(), String> {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
            for t in 0..100 {
                let z = random_orbit_point(spec, &mut rng);
                let coords = chart.coords_of_point(&z);
                for i in 0..dim {
                    let y = spec.basis_elem(i);
                    let via_chart = chart
                        .orbit_function(&y)
                        .eval(&coords)
                        .map_err(|e| e.to_string())?;
                    let direct = spec.killing(&y, &z).unwrap();
                    ok_if(via_chart == direct, || {
                        format!("point {t}, basis {}", spec.names[i])
                    })?;
                }
            }
            Ok(())
        })(),
    );

    run.finish(timings)
}

fn heisenberg_suite(chart: &Chart, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("heisenberg");
    let m = chart.spec.m;

    run.check(
        "heisenberg/delta-pairs",
        "[Delta_j, Delta'_k] = 2 delta_jk f0 d/dfp0 (= delta_jk eta^{x0}); other pairs commute",
        (|| -> Result<(), String> {
            for j in 1..=m {
                for k in 1..=m {
                    let got = chart
                        .delta_field(j, false)
                        .commutator(chart.delta_field(k, true));
                    let want = if j == k {
                        chart.eta_x0.clone()
                    } else {
                        DiffOp::zero(chart.vars.nvars())
                    };
                    ok_if(got == want, || format!("pair ({j}, {k})"))?;
                    ok_if(
                        chart
                            .delta_field(j, false)
                            .commutator(chart.delta_field(k, false))
                            .is_zero(),
                        || format!("unprimed pair ({j}, {k})"),
                    )?;
                    ok_if(
                        chart
                            .delta_field(j, true)
                            .commutator(chart.delta_field(k, true))
                            .is_zero(),
                        || format!("primed pair ({j}, {k})"),
                    )?;
                }
            }
            Ok(())
        })(),
    );

    run.check(
        "heisenberg/center",
        "[Delta, eta^{x0}] = 0 for every delta field",
        (|| -> Result<(), String> {
            for j in 1..=m {
                for primed in [false, true] {
                    ok_if(
                        chart
                            .delta_field(j, primed)
                            .commutator(&chart.eta_x0)
                            .is_zero(),
                        || format!("pair {j}, primed {primed}"),
                    )?;
                }
            }
            Ok(())
        })(),
    );

    run.check(
        "heisenberg/weights",
        "[eta^h, Delta] = -Delta, [E, Delta] = 0, [eta^h, eta^{x0}] = -2 eta^{x0}",
        (|| -> Result<(), String> {
            for j in 1..=m {
                for primed in [false, true] {
                    let d = chart.delta_field(j, primed);
                    ok_if(d.has_weight(&chart.eta_h, &rat_int(-1)), || {
                        format!("h-weight of Delta pair {j}")
                    })?;
                    ok_if(d.has_weight(&chart.euler, &rat_int(0)), || {
                        format!("Euler degree of Delta pair {j}")
                    })?;
                }
            }
            ok_if(chart.eta_x0.has_weight(&chart.eta_h, &rat_int(-2)), || {
                "h-weight of eta^{x0}".to_string()
            })?;
            ok_if(chart.eta_x0.has_weight(&chart.euler, &rat_int(0)), || {
                "Euler degree of eta^{x0}".to_string()
            })
        })(),
    );

    run.finish(timings)
}

fn build_suite(chart: &Chart, cfg: &SuiteConfig, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("build");
    let spec = &chart.spec;
    let sym = chart.symbol_vars();

    let a_op = exotic::build_a(chart);
    let bc = match spec.family {
        Family::So => Some((
            exotic::build_b(chart).unwrap(),
            exotic::build_c(chart).unwrap(),
        )),
        Family::Sl => None,
    };

    let mut ops: Vec<(&'static str, &DiffOp)> = vec![("A", &a_op)];
    if let Some((b, c)) = &bc {
        ops.push(("B", b));
        ops.push(("C", c));
    }

    for (name, op) in &ops {
        run.check(
            &format!("build/{}-shape", name.to_lowercase()),
            &format!("{name} has order 2, Euler degree 0, h-weight -2"),
            (|| -> Result<(), String> {
                ok_if(op.order() == Some(2), || format!("order {:?}", op.order()))?;
                ok_if(op.has_weight(&chart.euler, &rat_int(0)), || {
                    "Euler degree".to_string()
                })?;
                ok_if(op.has_weight(&chart.eta_h, &rat_int(-2)), || {
                    "h-weight".to_string()
                })
            })(),
        );
        run.check(
            &format!("build/{}-commutes-g-neg", name.to_lowercase()),
            &format!("[eta^z, {name}] = 0 for every basis z in g_neg"),
            (|| -> Result<(), String> {
                for &zi in &spec.g_neg_indices() {
                    let eta = chart.eta_field(&spec.basis_elem(zi));
                    ok_if(eta.commutator(op).is_zero(), || spec.names[zi].clone())?;
                }
                Ok(())
            })(),
        );
    }

    run.check(
        "build/symbols",
        "principal symbols of A (and B, C) equal the corresponding quadratics in theta",
        (|| -> Result<(), String> {
            let theta = |j: usize, primed: bool| chart.theta(j, primed);
            let (a_sym, b_sym, c_sym) = match spec.family {
                Family::Sl => {
                    let mut a = Poly::zero(sym.nvars());
                    for j in 1..=spec.m {
                        a = a.add(&theta(j, false).mul(&theta(j, true)));
                    }
                    (a, None, None)
                }
                Family::So => {
                    let g = spec.so_grouping.clone().unwrap();
                    let mut a = Poly::zero(sym.nvars());
                    let mut b = Poly::zero(sym.nvars());
                    let mut c = Poly::zero(sym.nvars());
                    for (&p, &t) in g.plain.iter().zip(g.tilde.iter()) {
                        a = a
                            .add(&theta(p, false).mul(&theta(p, true)))
                            .sub(&theta(t, false).mul(&theta(t, true)));
                        b = b.add(&theta(p, true).mul(&theta(t, false)));
                        c = c.add(&theta(p, false).mul(&theta(t, true)));
                    }
                    if let Some(t0) = g.tilde0 {
                        a = a.sub(&theta(t0, false).mul(&theta(t0, true)));
                        b = b.add(&theta(t0, false).mul(&theta(t0, false)).scale(&rat(1, 2)));
                        c = c.sub(&theta(t0, true).mul(&theta(t0, true)).scale(&rat(1, 2)));
                    }
                    (a, Some(b), Some(c))
                }
            };
            ok_if(a_op.principal_symbol(&sym).unwrap() == a_sym, || {
                "symbol of A".to_string()
            })?;
            if let (Some((b_op, c_op)), Some(bs), Some(cs)) = (&bc, b_sym, c_sym) {
                ok_if(b_op.principal_symbol(&sym).unwrap() == bs, || {
                    "symbol of B".to_string()
                })?;
                ok_if(c_op.principal_symbol(&sym).unwrap() == cs, || {
                    "symbol of C".to_string()
                })?;
            }
            Ok(())
        })(),
    );

    let k_top = cfg.k_max.min(4);
    run.check(
        "build/action-on-psi-powers",
        "A (and B, C) act on f_psi^k by -t_k (a|b|c)/f0 · f_psi^{k-1}",
        (|| -> Result<(), String> {
            let vars = &chart.vars;
            let powers = psi_powers(chart, k_top);
            let (a_fun, b_fun, c_fun) = match spec.family {
                Family::Sl => {
                    let mut a = vars.zero();
                    for j in 1..=spec.m {
                        a = a.add(&vars.var(vars.f(j)).mul(&vars.var(vars.fp(j))));
                    }
                    (a, None, None)
                }
                Family::So => {
                    let g = spec.so_grouping.clone().unwrap();
                    let mut a = vars.zero();
                    let mut b = vars.zero();
                    let mut c = vars.zero();
                    for (&p, &t) in g.plain.iter().zip(g.tilde.iter()) {
                        a = a
                            .add(&vars.var(vars.f(p)).mul(&vars.var(vars.fp(p))))
                            .sub(&vars.var(vars.f(t)).mul(&vars.var(vars.fp(t))));
                        b = b.add(&vars.var(vars.fp(p)).mul(&vars.var(vars.f(t))));
                        c = c.add(&vars.var(vars.f(p)).mul(&vars.var(vars.fp(t))));
                    }
                    if let Some(t0) = g.tilde0 {
                        a = a.sub(&vars.var(vars.f(t0)).mul(&vars.var(vars.fp(t0))));
                        b = b.add(
                            &vars
                                .var(vars.f(t0))
                                .mul(&vars.var(vars.f(t0)))
                                .scale(&rat(1, 2)),
                        );
                        c = c.sub(
                            &vars
                                .var(vars.fp(t0))
                                .mul(&vars.var(vars.fp(t0)))
                                .scale(&rat(1, 2)),
                        );
                    }
                    (a, Some(b), Some(c))
                }
            };
            let t_k = |k: i64| -> Rat {
                let k = rat_int(k);
                let mh = rat(spec.m as i64, 2);
                match spec.family {
                    Family::Sl => &k * (&k + &mh),
                    Family::So => &k * (&k + &mh - rat_int(1)),
                }
            };
            for k in 1..=k_top as i64 {
                let factor = -t_k(k);
                let mut checks: Vec<(&str, &DiffOp, &Poly)> = vec![("A", &a_op, &a_fun)];
                if let (Some((b_op, c_op)), Some(bf), Some(cf)) = (&bc, &b_fun, &c_fun) {
                    checks.push(("B", b_op, bf));
                    checks.push(("C", c_op, cf));
                }
                for (name, op, fun) in checks {
                    let got = op.apply(&powers[k as usize]);
                    let want = fun
                        .mul(&powers[k as usize - 1])
                        .mul(&vars.f0_pow(-1))
                        .scale(&factor);
                    ok_if(got == want, || format!("{name} at k = {k}"))?;
                }
            }
            Ok(())
        })(),
    );

    if spec.family == Family::Sl {
        run.check(
            "build/bc-rejected",
            "B and C constructions are rejected for sl",
            ok_if(
                exotic::build_b(chart).is_err() && exotic::build_c(chart).is_err(),
                || "B or C constructible for sl".to_string(),
            ),
        );
    }

    run.finish(timings)
}

fn q_solve_suite(eng: &exotic::Engine, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("q-solve");
    let spec = &eng.chart.spec;
    let want = CorrectionPoly::closed_form(spec.family, spec.m);

    run.check(
        "q-solve/recovered",
        "divisibility at k = 2..6 pins q(E) to the closed form",
        ok_if(eng.q == want, || {
            format!("solved {}, expected {}", eng.q.to_text(), want.to_text())
        }),
    );

    run.check(
        "q-solve/uniqueness-witness",
        "perturbing q by +1 breaks divisibility at k = 2",
        (|| -> Result<(), String> {
            let perturbed = eng.q.shifted(&rat_int(1));
            let defect = exotic::divisibility_defect(&eng.chart, &eng.main, &perturbed, 2);
            ok_if(!defect.is_zero(), || {
                "perturbed q still divides".to_string()
            })?;
            let good = exotic::divisibility_defect(&eng.chart, &eng.main, &eng.q, 2);
            ok_if(good.is_zero(), || {
                format!("defect {}", good.to_text(&eng.chart.vars.names()))
            })
        })(),
    );

    run.finish(timings)
}

fn eigenvalue_suite(eng: &exotic::Engine, cfg: &SuiteConfig, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("eigenvalues");
    let spec = &eng.chart.spec;
    match exotic::eigenvalue_sequence(&eng.chart, &eng.d0, cfg.k_max) {
        Err(e) => {
            run.check(
                "eigenvalues/sequence",
                "exact quotients D0(f_psi^k)/f_psi^{k-1}",
                Err(e.to_string()),
            );
        }
        Ok(seq) => {
            run.check(
                "eigenvalues/kernel-constants",
                "D0(1) = 0",
                ok_if(seq[0].is_zero(), || fmt_rat(&seq[0])),
            );
            for (k, got) in seq.iter().enumerate() {
                let want = eigenvalue_closed_form(spec.family, spec.m, k as u32);
                run.check(
                    &format!("eigenvalues/k={k}"),
                    &format!(
                        "D0(f_psi^{k}) = gamma({k}) f_psi^{} with gamma({k}) = {}",
                        k.saturating_sub(1),
                        fmt_rat(got)
                    ),
                    ok_if(*got == want, || {
                        format!("got {}, expected {}", fmt_rat(got), fmt_rat(&want))
                    }),
                );
            }
            if seq.len() >= 5 {
                run.check(
                    "eigenvalues/quartic-interpolant",
                    "gamma interpolates to a degree-4 polynomial, leading 1, coefficients >= 0",
                    match gamma_polynomial(&seq) {
                        None => Err("higher samples disagree with the interpolant".to_string()),
                        Some(coeffs) => (|| -> Result<(), String> {
                            ok_if(coeffs[4] == rat_int(1), || {
                                format!("leading coefficient {}", fmt_rat(&coeffs[4]))
                            })?;
                            ok_if(coeffs.iter().all(|c| !c.is_negative()), || {
                                "negative coefficient".to_string()
                            })
                        })(),
                    },
                );
            }
        }
    }
    run.finish(timings)
}

fn lowest_weight_suite(eng: &exotic::Engine, cfg: &SuiteConfig, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("lowest-weight");
    let chart = &eng.chart;
    let spec = &chart.spec;

    run.check(
        "lowest-weight/g-neg-annihilates",
        "[eta^z, D0] = 0 for all 2m+1 basis elements z of g_neg",
        (|| -> Result<(), String> {
            for &zi in &spec.g_neg_indices() {
                let eta = chart.eta_field(&spec.basis_elem(zi));
                ok_if(eta.commutator(&eng.d0).is_zero(), || spec.names[zi].clone())?;
            }
            Ok(())
        })(),
    );

    run.check(
        "lowest-weight/h-weight",
        "[eta^h, D0] = -2 D0",
        ok_if(eng.d0.has_weight(&chart.eta_h, &rat_int(-2)), || {
            "weight differs".to_string()
        }),
    );

    run.check(
        "lowest-weight/euler-degree",
        "[E, D0] = -D0",
        ok_if(eng.d0.has_weight(&chart.euler, &rat_int(-1)), || {
            "degree differs".to_string()
        }),
    );

    run.check(
        "lowest-weight/s-weights",
        "[eta^h, S] = -4 S and [E, S] = 0",
        (|| -> Result<(), String> {
            ok_if(eng.s_op.has_weight(&chart.eta_h, &rat_int(-4)), || {
                "h-weight of S".to_string()
            })?;
            ok_if(eng.s_op.has_weight(&chart.euler, &rat_int(0)), || {
                "Euler degree of S".to_string()
            })
        })(),
    );

    run.check(
        "lowest-weight/s-g-neg",
        "[eta^z, S] = 0 for all basis z of g_neg",
        (|| -> Result<(), String> {
            for &zi in &spec.g_neg_indices() {
                let eta = chart.eta_field(&spec.basis_elem(zi));
                ok_if(eta.commutator(&eng.s_op).is_zero(), || {
                    spec.names[zi].clone()
                })?;
            }
            Ok(())
        })(),
    );

    run.check(
        "lowest-weight/s-divisibility",
        "S(f_psi^k) = gamma(k) f0 f_psi^{k-1} for small k",
        (|| -> Result<(), String> {
            let k_top = cfg.k_max.min(4);
            let powers = psi_powers(chart, k_top);
            for k in 1..=k_top {
                let got = eng.s_op.apply(&powers[k as usize]);
                let want = chart
                    .vars
                    .var(0)
                    .mul(&powers[k as usize - 1])
                    .scale(&eigenvalue_closed_form(spec.family, spec.m, k));
                ok_if(got == want, || format!("k = {k}"))?;
            }
            Ok(())
        })(),
    );

    run.check(
        "lowest-weight/g0-orthogonal-spot",
        "[eta^x, D0] = 0 for sampled grading-0 elements orthogonal to h",
        (|| -> Result<(), String> {
            for x in spec.g0_orth_h_samples(3) {
                let eta = chart.eta_field(&x);
                ok_if(eta.commutator(&eng.d0).is_zero(), || {
                    "nonzero commutator".to_string()
                })?;
            }
            Ok(())
        })(),
    );

    run.finish(timings)
}

fn symbol_suite(eng: &exotic::Engine, timings: bool) -> SuiteReport {
    let mut run = SuiteRun::new("symbol");
    let chart = &eng.chart;
    let sym = chart.symbol_vars();

    run.check(
        "symbol/d0-order",
        "D0 has order 4",
        ok_if(eng.d0.order() == Some(4), || {
            format!("order {:?}", eng.d0.order())
        }),
    );

    run.check(
        "symbol/r0-identity",
        "symbol(D0) = f0^{-1}(P(Theta...) - 1/4 lambda^2 (Phi^{x0})^2)",
        (|| -> Result<(), String> {
            let got = eng.d0.principal_symbol(&sym).map_err(|e| e.to_string())?;
            let want = exotic::r0_symbol(chart);
            ok_if(got == want, || "symbol differs".to_string())
        })(),
    );

    run.check(
        "symbol/s-identity",
        "symbol(S) = P(Theta...) - 1/4 lambda^2 (Phi^{x0})^2",
        (|| -> Result<(), String> {
            let got = eng.s_op.principal_symbol(&sym).map_err(|e| e.to_string())?;
            let want = exotic::r0_symbol(chart).mul(&Poly::var(sym.nvars(), 0));
            ok_if(got == want, || "symbol differs".to_string())
        })(),
    );

    run.check(
        "symbol/multiplicative",
        "symbol(A∘A) = symbol(A)^2 (orders add)",
        (|| -> Result<(), String> {
            let sq = eng.a_op.compose(&eng.a_op);
            ok_if(sq.order() == Some(4), || "order dropped".to_string())?;
            let lhs = sq.principal_symbol(&sym).map_err(|e| e.to_string())?;
            let a_sym = eng.a_op.principal_symbol(&sym).map_err(|e| e.to_string())?;
            ok_if(lhs == a_sym.mul(&a_sym), || "symbol differs".to_string())
        })(),
    );

    run.finish(timings)
}

fn family_suite(
    eng: &exotic::Engine,
    family: &Option<ExoticFamily>,
    family_err: &Option<String>,
    cfg: &SuiteConfig,
    timings: bool,
) -> SuiteReport {
    let mut run = SuiteRun::new("family");
    let chart = &eng.chart;
    let spec = &chart.spec;

    let Some(fam) = family else {
        run.check(
            "family/span",
            "bracket closure spans dim g with path independence",
            Err(family_err.clone().unwrap_or_default()),
        );
        return run.finish(timings);
    };

    run.check(
        "family/span",
        "bracket closure spans dim g with path independence",
        ok_if(fam.ops.len() == spec.dim, || {
            format!("{} operators", fam.ops.len())
        }),
    );

    run.check(
        "family/d0-at-x0",
        "the operator attached to x0 is D0",
        ok_if(fam.op_for(&spec.x0) == eng.d0, || "differs".to_string()),
    );

    run.check(
        "family/shape",
        "every member has order 4, Euler degree -1, and h-weight equal to its grading",
        (|| -> Result<(), String> {
            for (i, op) in fam.ops.iter().enumerate() {
                ok_if(op.order() == Some(4), || {
                    format!("order of D_{}", spec.names[i])
                })?;
                ok_if(op.has_weight(&chart.euler, &rat_int(-1)), || {
                    format!("Euler degree of D_{}", spec.names[i])
                })?;
                ok_if(
                    op.has_weight(&chart.eta_h, &rat_int(spec.grading[i].into())),
                    || format!("h-weight of D_{}", spec.names[i]),
                )?;
            }
            Ok(())
        })(),
    );

    run.check(
        "family/intertwining-random",
        "[eta^y, D_x] = D_[y,x] on seeded random (y, x)",
        (|| -> Result<(), String> {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ 0xFA111);
            for _ in 0..8 {
                let mut y = LieElement::zero(spec.key(), spec.dim);
                for c in y.coords.iter_mut() {
                    *c = rat_int(rng.random_range(-2i64..=2));
                }
                let xi = rng.random_range(0..spec.dim);
                let x = spec.basis_elem(xi);
                let lhs = chart.eta_field(&y).commutator(&fam.ops[xi]);
                let rhs = fam.op_for(&spec.bracket(&y, &x).unwrap());
                ok_if(lhs == rhs, || format!("x = {}", spec.names[xi]))?;
            }
            Ok(())
        })(),
    );

    run.check(
        "family/conjugate-spot",
        "D_{x_psi}(f0^k) = gamma(k) f0^{k-1} for k <= 3",
        (|| -> Result<(), String> {
            let d_psi = fam.op_for(&spec.x_psi);
            for k in 1..=3u32 {
                let f0k = chart.vars.f0_pow(k as i16);
                let got = d_psi.apply(&f0k);
                let want = chart
                    .vars
                    .f0_pow(k as i16 - 1)
                    .scale(&eigenvalue_closed_form(spec.family, spec.m, k));
                ok_if(got == want, || format!("k = {k}"))?;
            }
            Ok(())
        })(),
    );

    run.finish(timings)
}

fn commutativity_suite(
    eng: &exotic::Engine,
    fam: &ExoticFamily,
    cfg: &SuiteConfig,
    timings: bool,
) -> SuiteReport {
    let mut run = SuiteRun::new("commutativity");
    let spec = &eng.chart.spec;
    let pairs = match cfg.pair_sampling {
        PairSampling::All => all_pairs(spec.dim),
        PairSampling::Count(c) => {
            let all = all_pairs(spec.dim);
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ 0x9A165);
            let mut chosen = Vec::with_capacity(c.min(all.len()));
            let mut idx: Vec<usize> = (0..all.len()).collect();
            for _ in 0..c.min(all.len()) {
                let pick = rng.random_range(0..idx.len());
                chosen.push(all[idx.swap_remove(pick)]);
            }
            chosen.sort_unstable();
            chosen
        }
    };
    let npairs = pairs.len();
    let offenders = exotic::noncommuting_pairs(fam, &pairs);
    run.check(
        "commutativity/pairs",
        &format!("[D_x, D_y] = 0 for {npairs} unordered basis pairs"),
        ok_if(offenders.is_empty(), || {
            let (i, j) = offenders[0];
            let comm = fam.ops[i].commutator(&fam.ops[j]);
            format!(
                "[D_{}, D_{}] != 0: {}",
                spec.names[i],
                spec.names[j],
                comm.to_text(&eng.chart.vars.names())
            )
        }),
    );
    run.check(
        "commutativity/self",
        "[D0, D0] = 0",
        ok_if(eng.d0.commutator(&eng.d0).is_zero(), || {
            "nonzero".to_string()
        }),
    );
    run.finish(timings)
}

fn gram_suite(
    eng: &exotic::Engine,
    fam: &ExoticFamily,
    cfg: &SuiteConfig,
    timings: bool,
) -> SuiteReport {
    let mut run = SuiteRun::new("gram");
    let chart = &eng.chart;
    let spec = &chart.spec;
    let key = spec.key();

    let one = Expr::one(key);
    run.check(
        "gram/unit",
        "(1|1) = 1",
        match pairing(chart, fam, &one, &one) {
            Ok(v) => ok_if(v == rat_int(1), || fmt_rat(&v)),
            Err(e) => Err(e.to_string()),
        },
    );

    run.check(
        "gram/psi-power-norms",
        "(f_psi^p | f_psi^p) = gamma(1)...gamma(p) > 0 for p <= 4",
        (|| -> Result<(), String> {
            let f_psi = Expr::from_element(&spec.x_psi);
            let mut expect = rat_int(1);
            for p in 1..=4u32 {
                expect *= eigenvalue_closed_form(spec.family, spec.m, p);
                let fp = f_psi.pow(p);
                let got = pairing(chart, fam, &fp, &fp).map_err(|e| e.to_string())?;
                ok_if(got == expect, || {
                    format!(
                        "p = {p}: got {}, expected {}",
                        fmt_rat(&got),
                        fmt_rat(&expect)
                    )
                })?;
                ok_if(got.is_positive(), || format!("p = {p} not positive"))?;
            }
            Ok(())
        })(),
    );

    run.check(
        "gram/degree-orthogonality",
        "pairings of unequal degrees vanish",
        (|| -> Result<(), String> {
            let f_psi = Expr::from_element(&spec.x_psi);
            let cases = [
                (f_psi.pow(2), f_psi.clone()),
                (f_psi.clone(), one.clone()),
                (f_psi.pow(3), f_psi.pow(1)),
            ];
            for (f, g) in cases {
                let v = pairing(chart, fam, &f, &g).map_err(|e| e.to_string())?;
                ok_if(v.is_zero(), || fmt_rat(&v))?;
            }
            Ok(())
        })(),
    );

    run.check(
        "gram/symmetry-random",
        "pairing(f, g) = pairing(g, f) on seeded random monomials",
        (|| -> Result<(), String> {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ 0x57117);
            for _ in 0..20 {
                let d = rng.random_range(1..=2usize);
                let m1: Vec<usize> = (0..d).map(|_| rng.random_range(0..spec.dim)).collect();
                let m2: Vec<usize> = (0..d).map(|_| rng.random_range(0..spec.dim)).collect();
                let f = Expr::monomial(key, m1, rat_int(1));
                let g = Expr::monomial(key, m2, rat_int(1));
                let fg = pairing(chart, fam, &f, &g).map_err(|e| e.to_string())?;
                let gf = pairing(chart, fam, &g, &f).map_err(|e| e.to_string())?;
                ok_if(fg == gf, || format!("{} vs {}", fmt_rat(&fg), fmt_rat(&gf)))?;
            }
            Ok(())
        })(),
    );

    run.check(
        "gram/adjointness-random",
        "(D_v h | g) = (h | conj(f_v) g) on 50 seeded random triples",
        (|| -> Result<(), String> {
            let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ 0xAD101);
            for _ in 0..50 {
                let v = rng.random_range(0..spec.dim);
                let p = rng.random_range(0..=1usize);
                let h_mono: Vec<usize> = (0..=p).map(|_| rng.random_range(0..spec.dim)).collect();
                let g_mono: Vec<usize> = (0..p).map(|_| rng.random_range(0..spec.dim)).collect();
                let h = Expr::monomial(key, h_mono, rat_int(1));
                let g = Expr::monomial(key, g_mono, rat_int(1));
                let f_v_bar = conjugate_expr(spec, &Expr::basis_fn(key, v));
                let lhs = pairing(chart, fam, &h, &f_v_bar.mul(&g)).map_err(|e| e.to_string())?;
                let image = fam.ops[v].apply(&chart_expand(chart, &h));
                let conj_g = conjugate_expr(spec, &g);
                let rhs = constant_term(chart, &lift_apply(fam, &conj_g, &image))
                    .map_err(|e| e.to_string())?;
                ok_if(lhs == rhs, || {
                    format!(
                        "v = {}: {} vs {}",
                        spec.names[v],
                        fmt_rat(&lhs),
                        fmt_rat(&rhs)
                    )
                })?;
            }
            Ok(())
        })(),
    );

    for p in 1..=cfg.gram_degree_max {
        let id = format!("gram/degree-{p}");
        match gram_matrix(chart, fam, p, cfg.seed) {
            Err(e) => run.check(&id, "Gram matrix", Err(e.to_string())),
            Ok(g) => {
                run.check(
                    &format!("{id}-psd"),
                    "Gram matrix is positive semidefinite (exact pivot certificate)",
                    ok_if(g.psd.psd, || {
                        let w = g.psd.witness.as_ref().unwrap();
                        let cells: Vec<String> = w.iter().map(fmt_rat).collect();
                        format!("indefinite witness ({})", cells.join(", "))
                    }),
                );
                run.check(
                    &format!("{id}-rank"),
                    "pivot rank equals the evaluation-oracle rank",
                    ok_if(g.psd.psd && g.psd.rank == g.eval_rank, || {
                        format!("pivot rank {}, evaluation rank {}", g.psd.rank, g.eval_rank)
                    }),
                );
                if p == 1 {
                    run.check(
                        &format!("{id}-full"),
                        "degree-1 Gram is positive definite of rank dim g",
                        ok_if(g.psd.rank == spec.dim, || format!("rank {}", g.psd.rank)),
                    );
                }
            }
        }
    }

    run.finish(timings)
}

// ---------------------------------------------------------------------------
// dumps
// ---------------------------------------------------------------------------

/// Canonical text dump of a named object for the configured algebra.
pub fn dump(cfg: &SuiteConfig, object: &str) -> Result<String, DumpError> {
    let spec = build_algebra(cfg.family, cfg.n)?;
    let chart = Chart::new(spec)
        .map_err(|e| DumpError::NotConstructible(object.to_string(), e.to_string()))?;
    let names = chart.vars.names();

    let need_engine = |chart: Chart| -> Result<exotic::Engine, DumpError> {
        exotic::Engine::build(chart)
            .map_err(|e| DumpError::NotConstructible(object.to_string(), e.to_string()))
    };

    match object {
        "f_psi" => Ok(format!("{}\n", chart.f_psi.to_text(&names))),
        "A" => Ok(format!("{}\n", exotic::build_a(&chart).to_text(&names))),
        "B" => {
            let op = exotic::build_b(&chart)
                .map_err(|e| DumpError::NotConstructible(object.into(), e.to_string()))?;
            Ok(format!("{}\n", op.to_text(&names)))
        }
        "C" => {
            let op = exotic::build_c(&chart)
                .map_err(|e| DumpError::NotConstructible(object.into(), e.to_string()))?;
            Ok(format!("{}\n", op.to_text(&names)))
        }
        "S" => {
            let eng = need_engine(chart)?;
            Ok(format!("{}\n", eng.s_op.to_text(&names)))
        }
        "D0" => {
            let eng = need_engine(chart)?;
            Ok(format!("{}\n", eng.d0.to_text(&names)))
        }
        other => {
            if let Some(p) = other.strip_prefix("gram:") {
                let p: usize = p
                    .parse()
                    .map_err(|_| DumpError::UnknownObject(other.to_string()))?;
                if p < 1 {
                    return Err(DumpError::UnknownObject(other.to_string()));
                }
                let eng = need_engine(chart)?;
                let fam = generate_family(&eng.chart, &eng.d0)
                    .map_err(|e| DumpError::NotConstructible(other.into(), e.to_string()))?;
                let g = gram_matrix(&eng.chart, &fam, p, cfg.seed)
                    .map_err(|e| DumpError::NotConstructible(other.into(), e.to_string()))?;
                Ok(gram_csv(&g))
            } else {
                Err(DumpError::UnknownObject(other.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl3_subset_run_passes() {
        let mut cfg = SuiteConfig::new(Family::Sl, 3);
        cfg.suites = vec![Suite::Model, Suite::Heisenberg, Suite::QSolve, Suite::Symbol];
        cfg.k_max = 4;
        let report = run(&cfg, false).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.suites.len(), 4);
    }

    #[test]
    fn deterministic_json() {
        let mut cfg = SuiteConfig::new(Family::Sl, 3);
        cfg.suites = vec![Suite::Model, Suite::QSolve];
        cfg.k_max = 4;
        let a = run(&cfg, false).unwrap().to_json();
        let b = run(&cfg, false).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": \"orbit-weyl/1\""));
    }

    #[test]
    fn dump_f_psi_golden() {
        let cfg = SuiteConfig::new(Family::Sl, 3);
        let text = dump(&cfg, "f_psi").unwrap();
        assert_eq!(text, "(1/4)*f0^-3*f1^2*fp1^2 - (1/4)*f0^-1*fp0^2\n");
    }

    #[test]
    fn dump_unknown_object() {
        let cfg = SuiteConfig::new(Family::Sl, 3);
        assert!(matches!(
            dump(&cfg, "nonsense"),
            Err(DumpError::UnknownObject(_))
        ));
    }

    #[test]
    fn suite_parse_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("bogus"), None);
    }
}
