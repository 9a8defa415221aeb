//! Named batch campaigns and their JSON reports.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{order_check, pairing, OrderMap, Stage};
use crate::grassmann::{
    all_splits, big_cell_point, diagram_paths, enumerate_cone_points, is_cone_point,
    lemma5_coordinate, pluecker_from_matrix, pluecker_relations, random_point, split_labels,
    surjectivity_check, AlphaMatrix,
};
use crate::ideals::chain_report;
use crate::linalg::Matrix;
use crate::matroids::{
    correspondence_check, is_minor, matroid_of, CaseOutcome, Derived, Matroid, MatroidJson,
};
use crate::scalars::{Field, FieldSpec};
use crate::symmetry::{antichain_element, antichain_verify, divides_mod_group};
use crate::with_field;

pub const TOOL: &str = "verify";

/// Largest stage (by symbol count) the linear-algebra campaigns accept.
pub const MAX_SYMBOLS: usize = 10;
/// Largest stage for the purely combinatorial antichain search.
pub const MAX_ANTICHAIN_SYMBOLS: usize = 16;
/// Cap on exhaustive sweeps over finite fields.
pub const SWEEP_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Lemma5,
    Antichain,
    Chain,
    Diagram,
    Matroid,
    Plucker,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Lemma5,
        Command::Antichain,
        Command::Chain,
        Command::Diagram,
        Command::Matroid,
        Command::Plucker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Lemma5 => "lemma5",
            Command::Antichain => "antichain",
            Command::Chain => "chain",
            Command::Diagram => "diagram",
            Command::Matroid => "matroid",
            Command::Plucker => "plucker",
        }
    }

    /// Fields used when none are given.
    pub fn default_fields(self) -> Vec<FieldSpec> {
        let gf = |p| FieldSpec::Prime { p };
        match self {
            Command::Lemma5 | Command::Diagram | Command::Plucker => {
                vec![gf(2), gf(101), FieldSpec::Rationals]
            }
            Command::Chain => vec![gf(2), gf(101)],
            Command::Matroid => vec![gf(2), gf(3)],
            Command::Antichain => Vec::new(),
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            Command::Lemma5 => 25,
            Command::Plucker => 200,
            Command::Diagram | Command::Matroid => 100,
            Command::Antichain | Command::Chain => 0,
        }
    }

    /// Stage bound (or exact stage for `chain`) used when none is given.
    pub fn default_stage(self) -> Option<Stage> {
        let s = |n, p| Stage::new(n, p).ok();
        match self {
            Command::Chain => s(3, 5),
            Command::Diagram | Command::Plucker => s(3, 3),
            Command::Matroid => s(3, 4),
            Command::Lemma5 | Command::Antichain => None,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown command {s:?}")))
    }
}

/// Everything a campaign run depends on. Unset options fall back to the
/// per-command defaults, which reproduce the acceptance suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignConfig {
    pub command: Command,
    pub fields: Vec<FieldSpec>,
    /// Exact stage for `chain` and `antichain`, upper bound elsewhere.
    pub stage: Option<Stage>,
    pub max_symbols: usize,
    pub max_n: u32,
    pub lmax: u32,
    pub samples: usize,
    pub seed: u64,
    /// Matrix input for `plucker` and `matroid`.
    pub matrix: Option<PathBuf>,
    /// Matroid input for `matroid` (the larger matroid of a minor test).
    pub matroid: Option<PathBuf>,
    /// Candidate minor for `matroid`.
    pub minor: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn new(command: Command) -> Self {
        CampaignConfig {
            command,
            fields: command.default_fields(),
            stage: command.default_stage(),
            max_symbols: 7,
            max_n: 6,
            lmax: 4,
            samples: command.default_samples(),
            seed: 0,
            matrix: None,
            matroid: None,
            minor: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Input(msg));
        let limit = match self.command {
            Command::Antichain => MAX_ANTICHAIN_SYMBOLS,
            _ => MAX_SYMBOLS,
        };
        if let Some(s) = self.stage {
            if s.symbol_count() > limit {
                return bad(format!("stage {s} has more than {limit} symbols"));
            }
        }
        if !(2..=MAX_SYMBOLS).contains(&self.max_symbols) {
            return bad(format!("--max-symbols must lie in 2..={MAX_SYMBOLS}"));
        }
        if !(3..=7).contains(&self.max_n) {
            return bad("--max-n must lie in 3..=7".into());
        }
        if !(3..=6).contains(&self.lmax) {
            return bad("--lmax must lie in 3..=6".into());
        }
        if self.samples > 100_000 {
            return bad("--samples is capped at 100000".into());
        }
        let needs_fields = self.command != Command::Antichain;
        if needs_fields && self.fields.is_empty() {
            return bad(format!("{} needs at least one field", self.command));
        }
        if (self.matroid.is_some() || self.minor.is_some()) && self.command != Command::Matroid {
            return bad("--matroid and --minor only apply to the matroid command".into());
        }
        if self.matroid.is_some() != self.minor.is_some() {
            return bad("--matroid and --minor must be given together".into());
        }
        if self.matrix.is_some() && !matches!(self.command, Command::Plucker | Command::Matroid) {
            return bad("--matrix only applies to plucker and matroid".into());
        }
        if self.matrix.is_some() && self.stage.is_none() {
            return bad("--matrix needs --stage".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: CampaignConfig,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.tool, self.version, self.command);
        for c in &self.checks {
            let v = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            out.push_str(&format!("{v} {}\n", c.name));
            if c.verdict == Verdict::Fail {
                out.push_str(&format!("  {}\n", c.details));
            }
        }
        out.push_str(match self.verdict {
            Verdict::Pass => "verdict: pass\n",
            Verdict::Fail => "verdict: fail\n",
        });
        out
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Input(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Reads a matrix of scalars: JSON (`[[..], ..]`, entries as strings or
/// integers) when the path ends in `.json`, headerless CSV otherwise.
pub fn read_matrix<F: Field>(field: &F, path: &Path) -> Result<Matrix<F>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    parse_matrix(field, &text, is_json)
}

pub fn parse_matrix<F: Field>(field: &F, text: &str, is_json: bool) -> Result<Matrix<F>> {
    let cells: Vec<Vec<String>> = if is_json {
        let raw: Vec<Vec<Value>> =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("matrix JSON: {e}")))?;
        raw.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(s),
                        Value::Number(n) => Ok(n.to_string()),
                        other => Err(Error::Input(format!(
                            "matrix entry {other} is not a scalar"
                        ))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    } else {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        reader
            .records()
            .map(|r| {
                r.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(|e| Error::Input(format!("matrix CSV: {e}")))
            })
            .collect::<Result<_>>()?
    };
    let rows = cells
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| field.parse(c))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(field, rows)
}

pub fn read_matroid(path: &Path) -> Result<Matroid> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let json: MatroidJson =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("matroid JSON: {e}")))?;
    Matroid::from_json(&json)
}

/// Stages `(n, p)` with `1 ≤ n ≤ bound.neg`, `1 ≤ p ≤ bound.pos`.
fn stages_within(bound: Stage) -> Vec<Stage> {
    (1..=bound.neg())
        .flat_map(|n| (1..=bound.pos()).map(move |p| Stage::new(n, p).expect("positive")))
        .collect()
}

fn check(name: String, ok: bool, details: Value) -> Check {
    Check {
        name,
        verdict: Verdict::from_bool(ok),
        details,
    }
}

/// Only the first few failing cases are kept in a report.
const MAX_CASES: usize = 10;

fn push_case(cases: &mut Vec<Value>, case: Value) {
    if cases.len() < MAX_CASES {
        cases.push(case);
    }
}

fn stage_json(s: Stage) -> Value {
    json!([s.neg(), s.pos()])
}

/// Runs the campaign. Errors are configuration or input problems; check
/// failures are reported in the returned [`Report`].
pub fn run(config: &CampaignConfig) -> Result<Report> {
    config.validate()?;
    let started_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();
    match config.command {
        Command::Lemma5 => {
            for &spec in &config.fields {
                let seed = rng.gen();
                checks.push(with_field!(spec, f => lemma5_campaign(&f, config, seed))?);
            }
        }
        Command::Antichain => checks.extend(antichain_campaign(config)?),
        Command::Chain => {
            let stage = config
                .stage
                .ok_or_else(|| Error::Input("chain needs --stage".into()))?;
            for &spec in &config.fields {
                checks.push(with_field!(spec, f => chain_campaign(&f, stage, config.lmax))?);
            }
        }
        Command::Diagram => {
            for &spec in &config.fields {
                let seed = rng.gen();
                checks.extend(with_field!(spec, f => diagram_campaign(&f, config, seed))?);
            }
        }
        Command::Matroid => {
            if let (Some(big), Some(small)) = (&config.matroid, &config.minor) {
                checks.push(minor_check(big, small)?);
            } else if let Some(path) = &config.matrix {
                for &spec in &config.fields {
                    checks.push(with_field!(spec, f => matroid_matrix_check(&f, config, path))?);
                }
            } else {
                for &spec in &config.fields {
                    let seed = rng.gen();
                    checks.push(with_field!(spec, f => matroid_campaign(&f, config, seed))?);
                }
            }
        }
        Command::Plucker => {
            if let Some(path) = &config.matrix {
                for &spec in &config.fields {
                    checks.push(with_field!(spec, f => plucker_matrix_check(&f, config, path))?);
                }
            } else {
                for &spec in &config.fields {
                    let seed = rng.gen();
                    checks.extend(with_field!(spec, f => plucker_campaign(&f, config, seed))?);
                }
            }
        }
    }
    let verdict = Verdict::from_bool(checks.iter().all(|c| c.verdict == Verdict::Pass));
    Ok(Report {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: config.command,
        config: config.clone(),
        started_at,
        checks,
        verdict,
    })
}

fn lemma5_campaign<F: Field>(f: &F, config: &CampaignConfig, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0usize;
    let mut stages = 0usize;
    let mut cases = Vec::new();
    let mut failures = 0usize;
    for total in 2..=config.max_symbols as u32 {
        for n in 1..total {
            let stage = Stage::new(n, total - n)?;
            stages += 1;
            let splits = all_splits(stage);
            for _ in 0..config.samples {
                let alpha = AlphaMatrix::random(f, stage, &mut rng);
                let pt = big_cell_point(&alpha);
                for (negs, pos) in &splits {
                    let closed = lemma5_coordinate(&alpha, negs, pos)?;
                    let direct = pairing(pt.coords(), &split_labels(negs, pos))?;
                    compared += 1;
                    if closed != direct {
                        failures += 1;
                        push_case(
                            &mut cases,
                            json!({
                                "stage": stage_json(stage),
                                "negatives": negs,
                                "positives": pos,
                                "closedForm": f.format(&closed),
                                "pairing": f.format(&direct),
                            }),
                        );
                    }
                }
            }
        }
    }
    Ok(check(
        format!("lemma5 {}", f.spec()),
        failures == 0,
        json!({"stages": stages, "comparisons": compared, "failures": failures, "cases": cases}),
    ))
}

fn antichain_campaign(config: &CampaignConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if let Some(stage) = config.stage {
        let r = antichain_verify(config.max_n, &stage)?;
        checks.push(check(
            format!("antichain {stage} up to n={}", config.max_n),
            r.verdict,
            serde_json::to_value(&r).expect("plain data"),
        ));
        return Ok(checks);
    }
    // each pair n < m at the smallest stage (m-1, m+2) used for a_m b_m
    for m in 4..=config.max_n {
        let stage = Stage::new(m - 1, m + 2)?;
        let y = antichain_element(m, &stage)?;
        let mut pairs = Vec::new();
        let mut ok = divides_mod_group(&y, &y)?.is_some();
        for n in 3..m {
            let x = antichain_element(n, &stage)?;
            let fwd = divides_mod_group(&x, &y)?;
            let bwd = divides_mod_group(&y, &x)?;
            ok &= fwd.is_none() && bwd.is_none();
            pairs.push(json!({
                "n": n,
                "m": m,
                "forwardWitness": fwd.map(|w| w.to_json()),
                "backwardWitness": bwd.map(|w| w.to_json()),
            }));
        }
        checks.push(check(
            format!("antichain m={m} at {stage}"),
            ok,
            json!({"stage": stage_json(stage), "pairs": pairs}),
        ));
    }
    Ok(checks)
}

fn chain_campaign<F: Field>(f: &F, stage: Stage, lmax: u32) -> Result<Check> {
    let r = chain_report(lmax, stage, f)?;
    Ok(check(
        format!("chain {} {stage} up to l={lmax}", f.spec()),
        r.verdict,
        serde_json::to_value(&r).expect("plain data"),
    ))
}

fn diagram_campaign<F: Field>(f: &F, config: &CampaignConfig, seed: u64) -> Result<Vec<Check>> {
    let bound = config.stage.unwrap_or(Stage::new(3, 3)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut failures = 0usize;
    let mut cases = Vec::new();
    let mut stages = Vec::new();
    for stage in stages_within(bound)
        .into_iter()
        .filter(|s| s.neg() >= 2 && s.pos() >= 2)
    {
        stages.push(stage_json(stage));
        for _ in 0..config.samples {
            let pt = random_point(f, stage, &mut rng);
            let (a, b) = diagram_paths(&pt)?;
            if a != b {
                failures += 1;
                push_case(
                    &mut cases,
                    json!({"stage": stage_json(stage), "point": pt.to_json(), "xiTheta": a.to_json(), "thetaXi": b.to_json()}),
                );
            }
        }
    }
    out.push(check(
        format!("diagram {} up to {bound}", f.spec()),
        failures == 0,
        json!({"sourceStages": stages, "samplesPerStage": config.samples, "failures": failures, "cases": cases}),
    ));

    let mut violations = Vec::new();
    let mut pairs = 0usize;
    for stage in stages_within(bound) {
        for map in [OrderMap::Beta, OrderMap::Eta] {
            let r = order_check(f, stage, map)?;
            pairs += r.pairs;
            for (u, v) in r.violations.into_iter().take(MAX_CASES) {
                push_case(
                    &mut violations,
                    json!({"map": map, "stage": stage_json(stage), "u": u, "v": v}),
                );
            }
        }
    }
    out.push(check(
        format!("order lemmas up to {bound}"),
        violations.is_empty(),
        json!({"pairs": pairs, "violations": violations}),
    ));

    let target = Stage::new(1, 2)?;
    if let Some(r) = surjectivity_check(f, target, SWEEP_LIMIT)? {
        out.push(check(
            format!("surjectivity {} onto {target}", f.spec()),
            r.passed(),
            serde_json::to_value(&r).expect("plain data"),
        ));
    }
    Ok(out)
}

fn outcome_tally(outcome: &CaseOutcome, tally: &mut [usize; 3], reasons: &mut Vec<String>) {
    match outcome {
        CaseOutcome::Pass => tally[0] += 1,
        CaseOutcome::Skipped { reason } => {
            tally[1] += 1;
            if reasons.len() < MAX_CASES && !reasons.contains(reason) {
                reasons.push(reason.clone());
            }
        }
        CaseOutcome::Fail { .. } => tally[2] += 1,
    }
}

fn matroid_campaign<F: Field>(f: &F, config: &CampaignConfig, seed: u64) -> Result<Check> {
    let bound = config.stage.unwrap_or(Stage::new(3, 4)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut contraction = [0usize; 3];
    let mut deletion = [0usize; 3];
    let mut reasons = Vec::new();
    let mut cases = Vec::new();
    let stages: Vec<Stage> = stages_within(bound);
    for stage in &stages {
        for _ in 0..config.samples {
            let pt = random_point(f, *stage, &mut rng);
            let r = correspondence_check(&pt)?;
            outcome_tally(&r.contraction, &mut contraction, &mut reasons);
            outcome_tally(&r.deletion, &mut deletion, &mut reasons);
            if r.contraction.is_fail() || r.deletion.is_fail() {
                push_case(
                    &mut cases,
                    json!({"stage": stage_json(*stage), "point": pt.to_json(), "report": r}),
                );
            }
        }
    }
    let tally = |t: [usize; 3]| json!({"pass": t[0], "skipped": t[1], "fail": t[2]});
    Ok(check(
        format!("matroid correspondence {} up to {bound}", f.spec()),
        contraction[2] == 0 && deletion[2] == 0,
        json!({
            "stages": stages.iter().map(|s| stage_json(*s)).collect::<Vec<_>>(),
            "samplesPerStage": config.samples,
            "contraction": tally(contraction),
            "deletion": tally(deletion),
            "skipReasons": reasons,
            "cases": cases,
        }),
    ))
}

fn matroid_matrix_check<F: Field>(f: &F, config: &CampaignConfig, path: &Path) -> Result<Check> {
    let stage = config.stage.expect("validated");
    let pt = pluecker_from_matrix(&read_matrix(f, path)?, stage)?;
    let matroid = match matroid_of(&pt)? {
        Derived::Matroid(m) => json!(m.to_json()),
        Derived::Marker(m) => json!(m),
    };
    let r = correspondence_check(&pt)?;
    Ok(check(
        format!("matroid of matrix {} {stage}", f.spec()),
        !r.contraction.is_fail() && !r.deletion.is_fail(),
        json!({"matroid": matroid, "correspondence": r}),
    ))
}

fn minor_check(big: &Path, small: &Path) -> Result<Check> {
    let n = read_matroid(big)?;
    let m = read_matroid(small)?;
    if n.ground().len() > MAX_SYMBOLS {
        return Err(Error::Input(format!(
            "minor search is limited to {MAX_SYMBOLS} elements"
        )));
    }
    let w = is_minor(&m, &n);
    Ok(check(
        "minor".into(),
        w.is_some(),
        json!({"isMinor": w.is_some(), "witness": w}),
    ))
}

/// `1 + (q-1)·[N choose p]_q`: the number of points on the affine cone of
/// `Gr(p, N)` over `GF(q)`.
fn cone_point_count(q: u64, total: u64, p: u64) -> Option<u64> {
    let mut num: u64 = 1;
    let mut den: u64 = 1;
    for i in 0..p {
        num = num.checked_mul(q.checked_pow((total - i) as u32)?.checked_sub(1)?)?;
        den = den.checked_mul(q.checked_pow((i + 1) as u32)?.checked_sub(1)?)?;
    }
    (q - 1).checked_mul(num / den)?.checked_add(1)
}

fn plucker_campaign<F: Field>(f: &F, config: &CampaignConfig, seed: u64) -> Result<Vec<Check>> {
    let bound = config.stage.unwrap_or(Stage::new(3, 3)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut cases = Vec::new();
    let mut relations = 0usize;
    for stage in stages_within(bound).into_iter().filter(|s| s.pos() >= 2) {
        let rels = pluecker_relations(f, stage);
        relations += rels.len();
        for _ in 0..config.samples {
            let pt = random_point(f, stage, &mut rng);
            for (k, r) in rels.iter().enumerate() {
                if !f.is_zero(&r.evaluate(pt.coords())?) {
                    failures += 1;
                    push_case(
                        &mut cases,
                        json!({"stage": stage_json(stage), "relation": k, "point": pt.to_json()}),
                    );
                }
            }
        }
    }
    let mut out = vec![check(
        format!("plucker relations vanish {} up to {bound}", f.spec()),
        failures == 0,
        json!({"relations": relations, "samplesPerStage": config.samples, "failures": failures, "cases": cases}),
    )];

    if let Some(elems) = f.elements() {
        let stage = Stage::new(2, 2)?;
        if let Some(points) = enumerate_cone_points(f, stage, SWEEP_LIMIT)? {
            let q = elems.len() as u64;
            let expected = cone_point_count(q, stage.symbol_count() as u64, stage.pos() as u64);
            out.push(check(
                format!("cone sweep {} {stage}", f.spec()),
                expected == Some(points.len() as u64),
                json!({"conePoints": points.len(), "expected": expected}),
            ));
        }
    }
    Ok(out)
}

fn plucker_matrix_check<F: Field>(f: &F, config: &CampaignConfig, path: &Path) -> Result<Check> {
    let stage = config.stage.expect("validated");
    let pt = pluecker_from_matrix(&read_matrix(f, path)?, stage)?;
    let ok = is_cone_point(pt.coords())?;
    Ok(check(
        format!("plucker of matrix {} {stage}", f.spec()),
        ok,
        json!({"coordinates": pt.to_json(), "relationsVanish": ok}),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::PrimeField;

    fn cfg(command: Command) -> CampaignConfig {
        CampaignConfig::new(command)
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("nope".parse::<Command>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(cfg(Command::Chain).validate().is_ok());
        let mut c = cfg(Command::Chain);
        c.lmax = 9;
        assert!(c.validate().is_err());
        let mut c = cfg(Command::Diagram);
        c.matrix = Some("m.csv".into());
        assert!(c.validate().is_err());
        let mut c = cfg(Command::Lemma5);
        c.fields.clear();
        assert!(c.validate().is_err());
        let mut c = cfg(Command::Matroid);
        c.matroid = Some("n.json".into());
        assert!(c.validate().is_err());
    }

    #[test]
    fn cone_point_counts() {
        assert_eq!(cone_point_count(2, 4, 2), Some(36));
        assert_eq!(cone_point_count(3, 3, 1), Some(27));
        assert_eq!(cone_point_count(2, 3, 3), Some(2));
    }

    #[test]
    fn matrix_parsing() {
        let f = PrimeField::new(7).unwrap();
        let m = parse_matrix(&f, "1, 2, 3\n4,5,6\n", false).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(*m.get(1, 2), 6);
        let m = parse_matrix(&f, r#"[[1, "2"], ["1/2", 0]]"#, true).unwrap();
        assert_eq!(*m.get(1, 0), 4);
        assert!(parse_matrix(&f, "1,2\n3\n", false).is_err());
        assert!(parse_matrix(&f, "[[true]]", true).is_err());
    }

    #[test]
    fn small_runs_pass_and_are_deterministic() {
        let mut c = cfg(Command::Lemma5);
        c.max_symbols = 4;
        c.samples = 3;
        c.seed = 42;
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert!(a.passed());
        assert_eq!(a.checks, b.checks);

        let mut c = cfg(Command::Diagram);
        c.samples = 5;
        let r = run(&c).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(r
            .checks
            .iter()
            .any(|c| c.name.starts_with("surjectivity gf:2")));

        let mut c = cfg(Command::Plucker);
        c.samples = 5;
        assert!(run(&c).unwrap().passed());

        let mut c = cfg(Command::Matroid);
        c.samples = 5;
        assert!(run(&c).unwrap().passed());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
    }
}
