use serde_json::{json, Map, Value};

use super::model::{Command, Model, EULER};
use crate::cech::{members, project_and_split, CocycleViolation, GluingData, PartitionWeights};
use crate::coeff::format_rational;
use crate::derivations::{adapted_check, eigen_decompose, filtration_splitting, leibniz_check, EigenDecomposition};
use crate::derivations::SuperDerivation;
use crate::error::{KernelError, Result};
use crate::grassmann::{apply_smooth, GrassmannElement, Parity};
use crate::presentation::{graded_basis, split_search, Presentation, SplitVerdict};

/// Number of random pairs for `leibniz` when none is given.
pub const DEFAULT_LEIBNIZ_TRIALS: u32 = 200;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: u64,
    /// Overrides the truncation degree of every presentation.
    pub max_degree: Option<u32>,
    /// Print odd generators as θ with superscripts in summaries.
    pub unicode: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Ok,
    /// A negative verdict or a detected violation.
    Negative,
    /// The command could not be carried out.
    Failed,
}

#[derive(Clone, PartialEq, Debug)]
pub struct CommandResult {
    pub command: String,
    pub outcome: Outcome,
    pub json: Value,
    pub summary: String,
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct RunReport {
    pub results: Vec<CommandResult>,
}

impl RunReport {
    /// 0 when every command succeeded with a positive verdict, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.results.iter().all(|r| r.outcome == Outcome::Ok) {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "results": self.results.iter().map(|r| r.json.clone()).collect::<Vec<_>>() })
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            s.push_str(&r.summary);
            s.push('\n');
        }
        s
    }
}

/// Deterministic JSON text: object keys sorted, two-space indentation, trailing newline.
pub fn emit_report(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn text(e: &GrassmannElement) -> String {
    e.to_text(false)
}

fn parity_name(e: &GrassmannElement) -> &'static str {
    match e.parity() {
        Some(Parity::Even) => "even",
        Some(Parity::Odd) => "odd",
        None => "mixed",
    }
}

pub fn derivation_json(d: &SuperDerivation) -> Value {
    let coeffs: Map<String, Value> = d
        .coefficients()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| (n.to_string(), Value::String(text(c))))
        .collect();
    json!({
        "text": d.to_text(),
        "parity": if d.parity() == Parity::Even { "even" } else { "odd" },
        "coefficients": coeffs,
    })
}

pub fn split_json(v: &SplitVerdict) -> Value {
    match v {
        SplitVerdict::Certificate(c) => json!({
            "query": "split",
            "status": "certificate",
            "d": c.d,
            "D": c.big_d,
            "derivation": derivation_json(&c.derivation),
            "unknowns": c.unknowns,
            "equations": c.equations,
            "checks": [
                { "name": "adapted", "passed": c.adapted.passed(), "checked": c.adapted.checked },
                { "name": "relations-preserved", "passed": c.relations_preserved.iter().all(|&b| b),
                  "per_relation": c.relations_preserved },
            ],
        }),
        SplitVerdict::NoCertificate { d, big_d, unknowns, equations } => json!({
            "query": "split",
            "status": "no-certificate",
            "d": d,
            "D": big_d,
            "derivation": Value::Null,
            "unknowns": unknowns,
            "equations": equations,
            "checks": [
                { "name": "linear-system", "passed": false, "detail": "inconsistent" },
            ],
        }),
    }
}

pub fn cocycle_violation_json(v: &CocycleViolation) -> Value {
    match v {
        CocycleViolation::Diagonal { chart, generator, image } => json!({
            "kind": "diagonal", "charts": [chart], "generator": generator, "image": text(image),
        }),
        CocycleViolation::Inverse { from, to, generator, image } => json!({
            "kind": "inverse", "charts": [from, to], "generator": generator,
            "image": image.as_ref().map(text),
        }),
        CocycleViolation::Triple { charts, generator, composed, direct } => json!({
            "kind": "triple", "charts": charts, "generator": generator,
            "composed": text(composed), "direct": text(direct),
        }),
        CocycleViolation::Missing { from, to } => json!({ "kind": "missing", "charts": [from, to] }),
    }
}

struct Ctx<'a> {
    model: &'a Model,
    opts: &'a RunOptions,
}

impl Ctx<'_> {
    fn presentation(&self) -> Result<Presentation> {
        self.model
            .presentation(self.opts.max_degree)
            .unwrap_or_else(|| Err(KernelError::argument("no ring declared")))
    }

    fn derivation(&self, name: &str) -> Result<SuperDerivation> {
        self.model
            .derivation(name)
            .ok_or_else(|| KernelError::argument(format!("unknown derivation `{name}`")))
    }

    fn cover(&self) -> Result<(GluingData, Option<PartitionWeights>)> {
        self.model
            .cover()
            .ok_or_else(|| KernelError::argument("no cover declared"))?
            .gluing(self.opts.max_degree)
    }

    fn show(&self, e: &GrassmannElement) -> String {
        e.to_text(self.opts.unicode)
    }
}

/// Runs every command of the model in order. Failures are reported per command.
pub fn run_model(model: &Model, opts: &RunOptions) -> RunReport {
    let ctx = Ctx { model, opts };
    let results = model
        .commands()
        .map(|cmd| match run_command(&ctx, cmd) {
            Ok((outcome, json, summary)) => CommandResult { command: cmd.to_text(), outcome, json, summary },
            Err(e) => CommandResult {
                command: cmd.to_text(),
                outcome: Outcome::Failed,
                json: json!({
                    "query": cmd.name(),
                    "status": "error",
                    "error": { "code": e.code(), "message": e.to_string() },
                }),
                summary: format!("{}: error: {e}", cmd.name()),
            },
        })
        .collect();
    RunReport { results }
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Ok
    } else {
        Outcome::Negative
    }
}

fn run_command(ctx: &Ctx, cmd: &Command) -> Result<(Outcome, Value, String)> {
    Ok(match cmd {
        Command::Split { d, big_d } => {
            let pres = ctx.presentation()?;
            let big_d = ctx.opts.max_degree.or(*big_d).unwrap_or(pres.truncation());
            let d = d.unwrap_or(pres.coeff_degree()).min(big_d);
            let v = split_search(&pres, d, big_d)?;
            let summary = match &v {
                SplitVerdict::Certificate(c) => format!("split: certificate at d={d} D={big_d}: E = {}", c.derivation),
                SplitVerdict::NoCertificate { .. } => format!("split: no certificate at d={d} D={big_d}"),
            };
            (verdict(v.is_certificate()), split_json(&v), summary)
        }
        Command::Gr(k) => {
            let pres = ctx.presentation()?;
            let piece = graded_basis(&pres, *k);
            let names = |v: &[GrassmannElement]| v.iter().map(text).collect::<Vec<_>>();
            let gens: Vec<String> = piece.generators.iter().map(|g| ctx.show(g)).collect();
            (
                Outcome::Ok,
                json!({
                    "query": "gr",
                    "k": k,
                    "rank": piece.rank(),
                    "dimension": piece.basis.len(),
                    "generators": names(&piece.generators),
                    "basis": names(&piece.basis),
                }),
                format!("gr {k}: rank {} generated by [{}]", piece.rank(), gens.join(", ")),
            )
        }
        Command::Euler => {
            let pres = ctx.presentation()?;
            let e = SuperDerivation::euler_field(pres.signature());
            let levels = filtration_splitting(&e, pres.truncation())?;
            let ok = levels.iter().all(|l| l.splits());
            let lv: Vec<Value> = levels
                .iter()
                .map(|l| {
                    json!({
                        "k": l.k, "dim_jk": l.dim_jk, "dim_kernel": l.dim_kernel,
                        "dim_jk1": l.dim_jk1, "dim_intersection": l.dim_intersection, "splits": l.splits(),
                    })
                })
                .collect();
            (
                verdict(ok),
                json!({
                    "query": "euler",
                    "status": if ok { "split" } else { "not-split" },
                    "derivation": derivation_json(&e),
                    "D": pres.truncation(),
                    "levels": lv,
                }),
                format!("euler: E = {e}; filtration {} at D={}", if ok { "splits" } else { "does not split" }, pres.truncation()),
            )
        }
        Command::Decompose { element, by } => {
            let e = ctx.derivation(by.as_deref().unwrap_or(EULER))?;
            match eigen_decompose(element, &e)? {
                EigenDecomposition::Components(comps) => {
                    let weights: Map<String, Value> =
                        comps.iter().map(|(k, c)| (k.to_string(), Value::String(text(c)))).collect();
                    let parts: Vec<String> = comps.iter().map(|(k, c)| format!("[{k}] {}", ctx.show(c))).collect();
                    (
                        Outcome::Ok,
                        json!({ "query": "decompose", "status": "decomposed", "element": text(element), "weights": weights }),
                        format!("decompose {}: {}", ctx.show(element), parts.join(", ")),
                    )
                }
                EigenDecomposition::NonDecomposable { residual } => (
                    Outcome::Negative,
                    json!({
                        "query": "decompose", "status": "non-decomposable",
                        "element": text(element), "residual": text(&residual),
                    }),
                    format!("decompose {}: not a sum of eigenvectors, residual {}", ctx.show(element), ctx.show(&residual)),
                ),
            }
        }
        Command::Apply { derivation, element } => {
            let r = ctx.derivation(derivation)?.apply(element)?;
            (
                Outcome::Ok,
                json!({ "query": "apply", "derivation": derivation, "element": text(element), "result": text(&r) }),
                format!("{derivation}({}) = {}", ctx.show(element), ctx.show(&r)),
            )
        }
        Command::Smooth { function, args } => {
            let r = apply_smooth(function, args)?;
            (
                Outcome::Ok,
                json!({
                    "query": "smooth", "function": function.to_text(),
                    "args": args.iter().map(text).collect::<Vec<_>>(), "result": text(&r),
                }),
                format!("{} = {}", function.to_text(), ctx.show(&r)),
            )
        }
        Command::Member(f) => {
            let pres = ctx.presentation()?;
            let m = pres.member(f)?;
            let cert = m.certificate.as_ref().map(|c| {
                c.iter()
                    .map(|t| {
                        json!({
                            "multiplier": text(&GrassmannElement::monomial(pres.signature(), &t.multiplier, crate::coeff::rat_int(1))),
                            "relation": t.relation,
                            "coeff": format_rational(&t.coeff),
                        })
                    })
                    .collect::<Vec<_>>()
            });
            (
                verdict(m.member),
                json!({ "query": "member", "element": text(f), "member": m.member, "certificate": cert }),
                format!("member {}: {}", ctx.show(f), if m.member { "yes" } else { "no" }),
            )
        }
        Command::Normal(f) => {
            let nf = ctx.presentation()?.normal_form(f)?;
            (
                Outcome::Ok,
                json!({ "query": "normal", "element": text(f), "normal_form": text(&nf) }),
                format!("normal {} = {}", ctx.show(f), ctx.show(&nf)),
            )
        }
        Command::Reduced => {
            let red = ctx.presentation()?.reduced_presentation();
            let basis = red.quotient_basis();
            let shown: Vec<String> = basis.iter().map(|b| ctx.show(b)).collect();
            (
                Outcome::Ok,
                json!({
                    "query": "reduced",
                    "relations": red.relations().iter().map(text).collect::<Vec<_>>(),
                    "basis": basis.iter().map(text).collect::<Vec<_>>(),
                }),
                format!("reduced: basis {{{}}}", shown.join(", ")),
            )
        }
        Command::Adapted { derivation, big_d } => {
            let pres = ctx.presentation()?;
            let e = ctx.derivation(derivation)?;
            let big_d = ctx.opts.max_degree.or(*big_d).unwrap_or(pres.truncation());
            let rep = adapted_check(&e, (!pres.is_free()).then_some(&pres), big_d)?;
            let failure = rep.failure.as_ref().map(|f| json!({ "k": f.k, "witness": text(&f.witness), "image": text(&f.image) }));
            let summary = match &rep.failure {
                None => format!("adapted {derivation}: yes ({} checks, D={big_d})", rep.checked),
                Some(f) => format!("adapted {derivation}: no, k={} witness {}", f.k, ctx.show(&f.witness)),
            };
            (
                verdict(rep.passed()),
                json!({
                    "query": "adapted", "derivation": derivation, "D": big_d,
                    "status": if rep.passed() { "adapted" } else { "not-adapted" },
                    "checked": rep.checked, "failure": failure,
                }),
                summary,
            )
        }
        Command::Leibniz { derivation, trials } => {
            let e = ctx.derivation(derivation)?;
            let trials = trials.unwrap_or(DEFAULT_LEIBNIZ_TRIALS);
            let rep = leibniz_check(&e, trials as usize, ctx.opts.seed)?;
            let violation = rep.violation.as_ref().map(|v| {
                json!({ "r": text(&v.r), "s": text(&v.s), "lhs": text(&v.lhs), "rhs": text(&v.rhs) })
            });
            (
                verdict(rep.passed()),
                json!({
                    "query": "leibniz", "derivation": derivation, "seed": ctx.opts.seed,
                    "status": if rep.passed() { "passed" } else { "violated" },
                    "exhaustive_pairs": rep.exhaustive_pairs, "random_pairs": rep.random_pairs,
                    "violation": violation,
                }),
                format!(
                    "leibniz {derivation}: {} ({} exhaustive, {} random pairs)",
                    if rep.passed() { "holds" } else { "violated" },
                    rep.exhaustive_pairs,
                    rep.random_pairs
                ),
            )
        }
        Command::Cocycles => {
            let (g, _) = ctx.cover()?;
            let rep = g.check_cocycles();
            let ok = rep.passed();
            (
                verdict(ok),
                json!({
                    "query": "cocycles",
                    "status": if ok { "passed" } else { "violated" },
                    "pairs_checked": rep.pairs_checked,
                    "triples_checked": rep.triples_checked,
                    "violations": rep.violations.iter().map(cocycle_violation_json).collect::<Vec<_>>(),
                }),
                format!(
                    "cocycles: {} ({} pairs, {} triples, {} violations)",
                    if ok { "ok" } else { "violated" },
                    rep.pairs_checked,
                    rep.triples_checked,
                    rep.violations.len()
                ),
            )
        }
        Command::Batchelor => {
            let (g, rho) = ctx.cover()?;
            let rho = rho.ok_or_else(|| KernelError::Precondition("no partition of unity declared (weights)".into()))?;
            let s = project_and_split(&g, &rho)?;
            let mut sigma = Map::new();
            let mut shown = Vec::new();
            let maximal = g.maximal_overlaps();
            for region in g.regions() {
                let mut per_region = Map::new();
                for i in members(region) {
                    let chart = &g.charts()[i].name;
                    let names = g.signature(i).even_names();
                    let imgs = s.sigma(i, region).unwrap_or(&[]);
                    let per: Map<String, Value> =
                        names.iter().zip(imgs).map(|(n, e)| (n.clone(), Value::String(text(e)))).collect();
                    if maximal.contains(&region) {
                        for (n, e) in names.iter().zip(imgs) {
                            shown.push(format!("{chart}.{n} -> {}", ctx.show(e)));
                        }
                    }
                    per_region.insert(chart.clone(), Value::Object(per));
                }
                sigma.insert(g.region_name(region), Value::Object(per_region));
            }
            let ok = s.verified();
            (
                verdict(ok),
                json!({
                    "query": "batchelor",
                    "status": if ok { "split" } else { "failed" },
                    "stages": s.stages.iter().map(|st| json!({
                        "stage": st.stage,
                        "obstruction_entries": st.obstruction_entries,
                        "correction_entries": st.correction_entries,
                    })).collect::<Vec<_>>(),
                    "checks": {
                        "projection": s.projection_ok,
                        "inverse": s.inverse_ok,
                        "overlap": s.overlap_ok,
                        "multiplicative": s.multiplicative_ok,
                    },
                    "sigma": sigma,
                }),
                format!("batchelor: {}; sigma on overlaps: {}", if ok { "globally split" } else { "verification failed" }, shown.join(", ")),
            )
        }
        Command::Show(e) => (
            Outcome::Ok,
            json!({
                "query": "show", "element": text(e), "parity": parity_name(e),
                "total_degree": e.total_degree(),
            }),
            ctx.show(e),
        ),
    })
}
