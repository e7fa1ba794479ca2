//! Problem files: the JSON input format for every command.

use std::path::Path;
use std::str::FromStr;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::funbackend::{DiagOperator, Domain1D, Gq, Interval, Piece, Poly, PwRational, Q};
use crate::hilbmod::OperatorMatrix;
use crate::matalg::{BlockProfile, CMat};
use crate::polar::Operator;
use crate::regular::{GradedComponent, GradedOperator, RegularOperator};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Matrix,
    Function,
    Graded,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Matrix => "matrix",
            Backend::Function => "function",
            Backend::Graded => "graded",
        }
    }
}

/// Rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;
/// One row-major matrix per block of the profile; block `i` of an operator
/// `A^k → A^m` is `k·nᵢ × m·nᵢ`, with entry `(j, l)` in rows `j·nᵢ..` and
/// columns `l·nᵢ..`.
pub type BlockArray = Vec<MatrixRows>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// Entries are the operator itself.
    #[default]
    Explicit,
    /// Entries are its bounded transform.
    Transform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixInput {
    #[serde(default)]
    pub form: Form,
    pub blocks: BlockArray,
}

/// A coefficient: `"p/q"` for a rational, `["p/q", "r/s"]` for `p/q + i r/s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(String),
    Complex([String; 2]),
}

fn one_coeffs() -> Vec<Coeff> {
    vec![Coeff::Real("1".into())]
}

fn is_one(c: &[Coeff]) -> bool {
    c == one_coeffs().as_slice()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceInput {
    pub lo: String,
    pub hi: String,
    /// Numerator coefficients, lowest degree first.
    pub num: Vec<Coeff>,
    #[serde(default = "one_coeffs", skip_serializing_if = "is_one")]
    pub den: Vec<Coeff>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PwInput {
    pub pieces: Vec<PieceInput>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionInput {
    pub entries: Vec<PwInput>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleRule {
    /// `t_n = base / n`
    InverseN,
    /// `t_n = n · base`
    LinearN,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyInput {
    pub scale: ScaleRule,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Exact scale `"p/q"` applied to `entries`; defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    pub blocks: BlockArray,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedInput {
    #[serde(default)]
    pub form: Form,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BlockArray>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentInput>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graded_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect_margin: Option<f64>,
}

impl Options {
    pub fn apply(&self, tol: &mut Tolerances) {
        if let Some(v) = self.tol {
            tol.identity = v;
        }
        if let Some(v) = self.rank_tol {
            tol.rank = v;
        }
        if let Some(v) = self.graded_threshold {
            tol.graded_threshold = v;
        }
        if let Some(v) = self.defect_margin {
            tol.defect_margin = v;
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("tol", self.tol),
            ("rank_tol", self.rank_tol),
            ("graded_threshold", self.graded_threshold),
            ("defect_margin", self.defect_margin),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Schema(format!(
                        "options.{name}: must be positive and finite"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The raw problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain_rank: Option<usize>,
    /// Function backend: `[["lo", "hi"], ...]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<[String; 2]>>,
    /// Function backend: number of diagonal entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub operator: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub operator: Operator,
    /// The matrix payload as written, before any transform inversion.
    pub payload: Option<OperatorMatrix>,
}

pub fn parse_problem(path: &Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_problem_str(&text)
}

pub fn parse_problem_str(text: &str) -> Result<Problem, CliError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    build(file)
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn sub<T: for<'de> Deserialize<'de>>(v: &serde_json::Value, what: &str) -> Result<T, CliError> {
    T::deserialize(v).map_err(|e| schema(format!("{what}: {e}")))
}

fn require<T: Copy>(v: Option<T>, name: &str, backend: Backend) -> Result<T, CliError> {
    v.ok_or_else(|| {
        schema(format!(
            "{name}: required for the {} backend",
            backend.name()
        ))
    })
}

fn forbid<T>(v: &Option<T>, name: &str, backend: Backend) -> Result<(), CliError> {
    match v {
        Some(_) => Err(schema(format!(
            "{name}: not allowed for the {} backend",
            backend.name()
        ))),
        None => Ok(()),
    }
}

pub fn build(file: ProblemFile) -> Result<Problem, CliError> {
    if let Some(o) = &file.options {
        o.validate()?;
    }
    let tol = Tolerances::default();
    match file.backend {
        Backend::Matrix => {
            forbid(&file.domain, "domain", file.backend)?;
            forbid(&file.rank, "rank", file.backend)?;
            let (profile, k, m) = matrix_shape(&file)?;
            let input: MatrixInput = sub(&file.operator, "operator")?;
            let payload = blocks_to_operator(&input.blocks, &profile, k, m, "operator.blocks")?;
            let regular = match input.form {
                Form::Explicit => RegularOperator::Explicit(payload.clone()),
                Form::Transform => {
                    RegularOperator::from_transform(payload.clone(), &tol).map_err(|e| {
                        schema(format!("operator.blocks: not a bounded transform: {e}"))
                    })?
                }
            };
            Ok(Problem {
                file,
                operator: Operator::Matrix(regular),
                payload: Some(payload),
            })
        }
        Backend::Graded => {
            forbid(&file.domain, "domain", file.backend)?;
            forbid(&file.rank, "rank", file.backend)?;
            let (profile, k, m) = matrix_shape(&file)?;
            let input: GradedInput = sub(&file.operator, "operator")?;
            let graded = build_graded(&input, &profile, k, m, None, &tol)?;
            Ok(Problem {
                file,
                operator: Operator::Graded(graded),
                payload: None,
            })
        }
        Backend::Function => {
            forbid(&file.profile, "profile", file.backend)?;
            forbid(&file.domain_rank, "domain_rank", file.backend)?;
            forbid(&file.codomain_rank, "codomain_rank", file.backend)?;
            let domain = parse_domain(
                file.domain
                    .as_ref()
                    .ok_or_else(|| schema("domain: required for the function backend"))?,
            )?;
            let rank = require(file.rank, "rank", file.backend)?;
            let input: FunctionInput = sub(&file.operator, "operator")?;
            if input.entries.len() != rank {
                return Err(schema(format!(
                    "operator.entries: {} functions for rank {rank}",
                    input.entries.len()
                )));
            }
            let entries = input
                .entries
                .iter()
                .enumerate()
                .map(|(i, pw)| input_to_pw(pw, &domain, &format!("operator.entries[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let diag = DiagOperator::new(domain, entries)
                .map_err(|e| schema(format!("operator.entries: {e}")))?;
            Ok(Problem {
                file,
                operator: Operator::Function(diag),
                payload: None,
            })
        }
    }
}

impl Problem {
    /// Rebuild a graded operator with `count` family members.
    pub fn with_components(&self, count: usize) -> Result<Problem, CliError> {
        let Backend::Graded = self.file.backend else {
            return Ok(self.clone());
        };
        let (profile, k, m) = matrix_shape(&self.file)?;
        let input: GradedInput = sub(&self.file.operator, "operator")?;
        let graded = build_graded(&input, &profile, k, m, Some(count), &Tolerances::default())?;
        Ok(Problem {
            operator: Operator::Graded(graded),
            ..self.clone()
        })
    }
}

fn matrix_shape(file: &ProblemFile) -> Result<(BlockProfile, usize, usize), CliError> {
    let sizes = file.profile.clone().ok_or_else(|| {
        schema(format!(
            "profile: required for the {} backend",
            file.backend.name()
        ))
    })?;
    let profile = BlockProfile::new(sizes).map_err(|e| schema(format!("profile: {e}")))?;
    let k = require(file.domain_rank, "domain_rank", file.backend)?;
    let m = require(file.codomain_rank, "codomain_rank", file.backend)?;
    Ok((profile, k, m))
}

fn build_graded(
    input: &GradedInput,
    profile: &BlockProfile,
    k: usize,
    m: usize,
    count_override: Option<usize>,
    tol: &Tolerances,
) -> Result<GradedOperator, CliError> {
    let wrap = |t: OperatorMatrix, what: &str| -> Result<RegularOperator, CliError> {
        match input.form {
            Form::Explicit => Ok(t.into()),
            Form::Transform => RegularOperator::from_transform(t, tol)
                .map_err(|e| schema(format!("{what}: not a bounded transform: {e}"))),
        }
    };
    let components = match (&input.base, &input.family, &input.components) {
        (Some(base), Some(family), None) => {
            let base = wrap(
                blocks_to_operator(base, profile, k, m, "operator.base")?,
                "operator.base",
            )?;
            let count = count_override.unwrap_or(family.count);
            if count == 0 {
                return Err(schema("operator.family.count: must be positive"));
            }
            (1..=count as u64)
                .map(|n| {
                    let n_q = Q::from_integer(n.into());
                    let scale = match family.scale {
                        ScaleRule::InverseN => n_q.recip(),
                        ScaleRule::LinearN => n_q,
                        ScaleRule::Constant => Q::from_integer(1.into()),
                    };
                    GradedComponent::scaled(n.to_string(), scale, base.clone())
                })
                .collect()
        }
        (None, None, Some(list)) => {
            if list.is_empty() {
                return Err(schema("operator.components: must not be empty"));
            }
            let list = match count_override {
                Some(c) => &list[..c.min(list.len())],
                None => &list[..],
            };
            list.iter()
                .enumerate()
                .map(|(i, c)| {
                    let what = format!("operator.components[{i}]");
                    let base = wrap(blocks_to_operator(&c.blocks, profile, k, m, &what)?, &what)?;
                    let scale = match &c.scale {
                        Some(s) => parse_q(s, &format!("{what}.scale"))?,
                        None => Q::from_integer(1.into()),
                    };
                    let label = c.label.clone().unwrap_or_else(|| (i + 1).to_string());
                    Ok(GradedComponent::scaled(label, scale, base))
                })
                .collect::<Result<Vec<_>, CliError>>()?
        }
        _ => {
            return Err(schema(
                "operator: give either `base` with `family`, or `components`",
            ))
        }
    };
    GradedOperator::new(components, tol).map_err(|e| schema(format!("operator: {e}")))
}

fn blocks_to_operator(
    blocks: &BlockArray,
    profile: &BlockProfile,
    k: usize,
    m: usize,
    what: &str,
) -> Result<OperatorMatrix, CliError> {
    if blocks.len() != profile.num_blocks() {
        return Err(schema(format!(
            "{what}: {} blocks, expected {} for profile {profile}",
            blocks.len(),
            profile.num_blocks()
        )));
    }
    let mut out = Vec::with_capacity(blocks.len());
    for (i, (rows, &n)) in blocks.iter().zip(profile.sizes()).enumerate() {
        let (nr, nc) = (k * n, m * n);
        if rows.len() != nr {
            return Err(schema(format!(
                "{what}[{i}]: {} rows, expected {nr}",
                rows.len()
            )));
        }
        let mut b = CMat::zeros(nr, nc);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != nc {
                return Err(schema(format!(
                    "{what}[{i}][{r}]: {} columns, expected {nc}",
                    row.len()
                )));
            }
            for (c, z) in row.iter().enumerate() {
                if !z[0].is_finite() || !z[1].is_finite() {
                    return Err(schema(format!("{what}[{i}][{r}][{c}]: non-finite value")));
                }
                b[(r, c)] = Complex::new(z[0], z[1]);
            }
        }
        out.push(b);
    }
    OperatorMatrix::from_blocks(profile.clone(), k, m, out)
        .map_err(|e| schema(format!("{what}: {e}")))
}

/// Inverse of the block layout used in problem files.
pub fn operator_to_blocks(t: &OperatorMatrix) -> BlockArray {
    t.blocks()
        .iter()
        .map(|b| {
            (0..b.nrows())
                .map(|r| {
                    (0..b.ncols())
                        .map(|c| [b[(r, c)].re, b[(r, c)].im])
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn parse_q(s: &str, what: &str) -> Result<Q, CliError> {
    Q::from_str(s.trim()).map_err(|_| schema(format!("{what}: `{s}` is not a rational \"p/q\"")))
}

fn parse_coeff(c: &Coeff, what: &str) -> Result<Gq, CliError> {
    match c {
        Coeff::Real(s) => Ok(Gq::real(parse_q(s, what)?)),
        Coeff::Complex([re, im]) => Ok(Gq::new(parse_q(re, what)?, parse_q(im, what)?)),
    }
}

fn parse_poly(cs: &[Coeff], what: &str) -> Result<Poly<Gq>, CliError> {
    let coeffs = cs
        .iter()
        .enumerate()
        .map(|(d, c)| parse_coeff(c, &format!("{what}[{d}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Poly::new(coeffs))
}

pub fn parse_domain(raw: &[[String; 2]]) -> Result<Domain1D, CliError> {
    let comps = raw
        .iter()
        .enumerate()
        .map(|(i, [lo, hi])| {
            let what = format!("domain[{i}]");
            Interval::new(parse_q(lo, &what)?, parse_q(hi, &what)?)
                .map_err(|e| schema(format!("{what}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Domain1D::new(comps).map_err(|e| schema(format!("domain: {e}")))
}

pub fn input_to_pw(input: &PwInput, domain: &Domain1D, what: &str) -> Result<PwRational, CliError> {
    let pieces = input
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let w = format!("{what}.pieces[{i}]");
            let span = Interval::new(parse_q(&p.lo, &w)?, parse_q(&p.hi, &w)?)
                .map_err(|e| schema(format!("{w}: {e}")))?;
            Piece::new(
                span,
                parse_poly(&p.num, &format!("{w}.num"))?,
                parse_poly(&p.den, &format!("{w}.den"))?,
            )
            .map_err(|e| schema(format!("{w}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PwRational::from_pieces(domain.clone(), pieces).map_err(|e| schema(format!("{what}: {e}")))
}

fn coeff_to_input(c: &Gq) -> Coeff {
    if c.is_real() {
        Coeff::Real(c.re.to_string())
    } else {
        Coeff::Complex([c.re.to_string(), c.im.to_string()])
    }
}

fn poly_to_input(p: &Poly<Gq>) -> Vec<Coeff> {
    if p.is_zero() {
        return vec![Coeff::Real("0".into())];
    }
    p.coeffs().iter().map(coeff_to_input).collect()
}

pub fn pw_to_input(f: &PwRational) -> PwInput {
    PwInput {
        pieces: f
            .flat_pieces()
            .map(|p| PieceInput {
                lo: p.span.lo.to_string(),
                hi: p.span.hi.to_string(),
                num: poly_to_input(&p.num),
                den: poly_to_input(&p.den),
            })
            .collect(),
    }
}

pub fn domain_to_input(d: &Domain1D) -> Vec<[String; 2]> {
    d.components()
        .iter()
        .map(|c| [c.lo.to_string(), c.hi.to_string()])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const NILPOTENT: &str = r#"{
        "backend": "matrix", "profile": [1], "domain_rank": 2, "codomain_rank": 2,
        "operator": {"blocks": [[[[0,0], [1,0]], [[0,0], [0,0]]]]}
    }"#;

    #[test]
    fn parses_matrix_problem() {
        let p = parse_problem_str(NILPOTENT).unwrap();
        let Some(t) = p.payload else { panic!() };
        assert_eq!(t.profile().sizes(), &[1]);
        assert_eq!(t.domain_rank(), 2);
        assert_eq!(t.block(0)[(0, 1)], Complex::new(1.0, 0.0));
        let blocks = operator_to_blocks(&t);
        let again = blocks_to_operator(&blocks, t.profile(), 2, 2, "x").unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn shape_errors_name_the_entry() {
        let bad = NILPOTENT.replace("[[0,0], [1,0]]", "[[0,0], [1,0], [2,0]]");
        match parse_problem_str(&bad) {
            Err(CliError::Schema(m)) => assert!(m.contains("operator.blocks[0][0]"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = NILPOTENT.replace("\"backend\"", "\"colour\": 1, \"backend\"");
        match parse_problem_str(&bad) {
            Err(CliError::Parse { message, .. }) => assert!(message.contains("colour")),
            other => panic!("{other:?}"),
        }
        let bad = NILPOTENT.replace("\"blocks\"", "\"extra\": 0, \"blocks\"");
        assert!(matches!(parse_problem_str(&bad), Err(CliError::Schema(_))));
    }

    #[test]
    fn rational_round_trip() {
        let text = r#"{
            "backend": "function", "domain": [["0", "1"], ["2", "3"]], "rank": 1,
            "operator": {"entries": [{"pieces": [
                {"lo": "0", "hi": "1", "num": ["-2/4", "3"], "den": ["7/3"]},
                {"lo": "2", "hi": "3", "num": ["1", "-1/2"], "den": ["5", "1"]}
            ]}]}
        }"#;
        let p = parse_problem_str(text).unwrap();
        let Operator::Function(d) = &p.operator else {
            panic!()
        };
        let input = pw_to_input(&d.entries()[0]);
        let back = input_to_pw(&input, d.domain(), "x").unwrap();
        assert_eq!(&back, &d.entries()[0]);
        assert_eq!(pw_to_input(&back), input);
        assert_eq!(
            input.pieces[0].num,
            vec![Coeff::Real("-3/14".into()), Coeff::Real("9/7".into())]
        );
    }

    #[test]
    fn complex_coefficients_round_trip() {
        let d = parse_domain(&[["0".into(), "1".into()]]).unwrap();
        let input: PwInput = serde_json::from_str(
            r#"{"pieces": [{"lo": "0", "hi": "1", "num": [["1", "1/2"], "2"]}]}"#,
        )
        .unwrap();
        let f = input_to_pw(&input, &d, "f").unwrap();
        assert!(!f.is_real());
        assert_eq!(pw_to_input(&f), input);
    }

    #[test]
    fn graded_family_and_override() {
        let text = r#"{
            "backend": "graded", "profile": [1], "domain_rank": 1, "codomain_rank": 1,
            "operator": {"base": [[[[1,0]]]], "family": {"scale": "inverse_n", "count": 50}}
        }"#;
        let p = parse_problem_str(text).unwrap();
        let Operator::Graded(g) = &p.operator else {
            panic!()
        };
        assert_eq!(g.components().len(), 50);
        let Operator::Graded(g) = p.with_components(5).unwrap().operator else {
            panic!()
        };
        assert_eq!(g.components().len(), 5);
    }
}
