//! Problem files: JSON with every exact number written as a rational string.

use bethe_core::kernels::BetheConfig;
use bethe_core::scalar::Variant;
use bethe_core::spectral::Direction;
use bethe_core::Q;
use serde::{Deserialize, Serialize};

pub const VERSION: u32 = 1;

/// The five subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Crosscheck,
    Identities,
    Norm,
    Formfactor,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Crosscheck => "crosscheck",
            Command::Identities => "identities",
            Command::Norm => "norm",
            Command::Formfactor => "formfactor",
            Command::Bench => "bench",
        }
    }
}

/// On-disk form. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// "semi-on-shell" or "twisted".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_c: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_c: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_b: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_b: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varkappa: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<[String; 3]>,
    /// Free values as `[point, value]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r3: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_b: Option<usize>,
    /// Pins random trials to one cardinality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<i64>,
    /// Norm input: on-shell roots, derivatives and directions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<RawDirection>>,
    /// Form factor indices, default 1, 2, 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<usize>,
    /// Bench schedule as `[a, b]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_secs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDirection {
    pub du: Vec<String>,
    pub dv: Vec<String>,
}

/// Explicit norm data.
#[derive(Debug, Clone, PartialEq)]
pub struct NormInput {
    pub u: Vec<Q>,
    pub v: Vec<Q>,
    pub c: Q,
    pub d: Vec<Q>,
    pub e: Vec<Q>,
    pub directions: Vec<Direction>,
}

/// Parsed problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub command: Option<Command>,
    pub variant: Variant,
    pub config: Option<BetheConfig<Q>>,
    pub norm: Option<NormInput>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub max_a: Option<usize>,
    pub max_b: Option<usize>,
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub height: Option<i64>,
    pub indices: Option<Vec<usize>>,
    pub pivot: Option<usize>,
    pub sizes: Option<Vec<(usize, usize)>>,
    pub budget_secs: Option<f64>,
    pub large: bool,
}

/// Where parsing failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseFailure {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "field {field}: ")?;
        }
        f.write_str(&self.message)
    }
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn fail(&self, field: String, raw: Option<&str>, message: String) -> ParseFailure {
        let line = raw.and_then(|r| self.line_of(r, &field));
        ParseFailure { line, column: None, field: Some(field), message }
    }

    /// Line of the first quoted occurrence of `raw`, preferring one after the
    /// field's key.
    fn line_of(&self, raw: &str, field: &str) -> Option<usize> {
        let key = field.split(['[', '.']).next().unwrap_or(field);
        let start = self.text.find(&format!("\"{key}\"")).unwrap_or(0);
        let needle = serde_json::to_string(raw).ok()?;
        let at = self.text[start..].find(&needle).map(|p| p + start).or_else(|| self.text.find(&needle))?;
        Some(self.text[..at].matches('\n').count() + 1)
    }

    fn q(&self, field: &str, raw: &str) -> Result<Q, ParseFailure> {
        raw.parse::<Q>().map_err(|e| self.fail(field.to_string(), Some(raw), format!("{e} in {raw:?}")))
    }

    fn qs(&self, field: &str, raws: &[String]) -> Result<Vec<Q>, ParseFailure> {
        raws.iter().enumerate().map(|(n, r)| self.q(&format!("{field}[{n}]"), r)).collect()
    }
}

/// Parses problem text. JSON syntax errors carry line and column, bad values
/// carry the field path and the line they sit on.
pub fn parse_problem(text: &str) -> Result<Problem, ParseFailure> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| ParseFailure {
        line: Some(e.line()),
        column: Some(e.column()),
        field: None,
        message: e.to_string(),
    })?;
    from_raw(&raw, text)
}

pub fn from_raw(raw: &RawProblem, text: &str) -> Result<Problem, ParseFailure> {
    let ctx = Ctx { text };
    if raw.version != VERSION {
        return Err(ctx.fail("version".into(), None, format!("unsupported version {}, expected {VERSION}", raw.version)));
    }
    let variant = match raw.variant.as_deref() {
        None | Some("semi-on-shell") => Variant::SemiOnShell,
        Some("twisted") => Variant::TwistedOnShell,
        Some(other) => {
            return Err(ctx.fail("variant".into(), Some(other), format!("unknown variant {other:?}")));
        }
    };
    let sets = [&raw.u_c, &raw.v_c, &raw.u_b, &raw.v_b];
    let config = if raw.c.is_some() && sets.iter().any(|s| s.is_some()) {
        let c = ctx.q("c", raw.c.as_ref().unwrap())?;
        let get = |name: &str, s: &Option<Vec<String>>| ctx.qs(name, s.as_deref().unwrap_or(&[]));
        let mut cfg = BetheConfig::new_unchecked(
            c,
            get("u_c", &raw.u_c)?,
            get("v_c", &raw.v_c)?,
            get("u_b", &raw.u_b)?,
            get("v_b", &raw.v_b)?,
        )
        .map_err(|e| ctx.fail("u_c".into(), None, e.to_string()))?;
        if let Some(vk) = &raw.varkappa {
            cfg.varkappa = ctx.q("varkappa", vk)?;
        }
        if let Some([k1, k2, k3]) = &raw.kappa {
            cfg.kappa = [ctx.q("kappa[0]", k1)?, ctx.q("kappa[1]", k2)?, ctx.q("kappa[2]", k3)?];
        }
        for (name, table, pairs) in [("r1", &mut cfg.r1_table, &raw.r1), ("r3", &mut cfg.r3_table, &raw.r3)] {
            for (n, [p, val]) in pairs.iter().flatten().enumerate() {
                let point = ctx.q(&format!("{name}[{n}][0]"), p)?;
                let value = ctx.q(&format!("{name}[{n}][1]"), val)?;
                table.insert(point, value, None);
            }
        }
        Some(cfg)
    } else {
        None
    };
    let norm = if raw.u.is_some() || raw.v.is_some() {
        let c = ctx.q("c", raw.c.as_deref().ok_or_else(|| ctx.fail("c".into(), None, "missing".into()))?)?;
        let get = |name: &str, s: &Option<Vec<String>>| ctx.qs(name, s.as_deref().unwrap_or(&[]));
        let directions = raw
            .directions
            .iter()
            .flatten()
            .enumerate()
            .map(|(n, d)| {
                Ok(Direction {
                    du: ctx.qs(&format!("directions[{n}].du"), &d.du)?,
                    dv: ctx.qs(&format!("directions[{n}].dv"), &d.dv)?,
                })
            })
            .collect::<Result<Vec<_>, ParseFailure>>()?;
        Some(NormInput {
            u: get("u", &raw.u)?,
            v: get("v", &raw.v)?,
            c,
            d: get("d", &raw.d)?,
            e: get("e", &raw.e)?,
            directions,
        })
    } else {
        None
    };
    if let Some(h) = raw.height {
        if h < 1 {
            return Err(ctx.fail("height".into(), None, format!("height must be positive, got {h}")));
        }
    }
    Ok(Problem {
        command: raw.command,
        variant,
        config,
        norm,
        seed: raw.seed,
        trials: raw.trials,
        max_a: raw.max_a,
        max_b: raw.max_b,
        a: raw.a,
        b: raw.b,
        height: raw.height,
        indices: raw.i.clone(),
        pivot: raw.pivot,
        sizes: raw.sizes.as_ref().map(|s| s.iter().map(|&[a, b]| (a, b)).collect()),
        budget_secs: raw.budget_secs,
        large: raw.large.unwrap_or(false),
    })
}

/// Normalized on-disk form of a parsed problem.
pub fn emit(p: &Problem) -> RawProblem {
    let s = |x: &Q| x.to_string();
    let ss = |xs: &[Q]| xs.iter().map(s).collect::<Vec<_>>();
    let mut raw = RawProblem {
        version: VERSION,
        command: p.command,
        variant: Some(match p.variant {
            Variant::SemiOnShell => "semi-on-shell".into(),
            Variant::TwistedOnShell => "twisted".into(),
        }),
        seed: p.seed,
        trials: p.trials,
        max_a: p.max_a,
        max_b: p.max_b,
        a: p.a,
        b: p.b,
        height: p.height,
        i: p.indices.clone(),
        pivot: p.pivot,
        sizes: p.sizes.as_ref().map(|v| v.iter().map(|&(a, b)| [a, b]).collect()),
        budget_secs: p.budget_secs,
        large: p.large.then_some(true),
        ..RawProblem::default()
    };
    if let Some(cfg) = &p.config {
        raw.c = Some(s(&cfg.c));
        raw.u_c = Some(ss(&cfg.u_c));
        raw.v_c = Some(ss(&cfg.v_c));
        raw.u_b = Some(ss(&cfg.u_b));
        raw.v_b = Some(ss(&cfg.v_b));
        raw.varkappa = Some(s(&cfg.varkappa));
        raw.kappa = Some([s(&cfg.kappa[0]), s(&cfg.kappa[1]), s(&cfg.kappa[2])]);
        let table = |t: &bethe_core::kernels::RTable<Q>| t.iter().map(|(p, v, _)| [s(p), s(v)]).collect::<Vec<_>>();
        raw.r1 = Some(table(&cfg.r1_table));
        raw.r3 = Some(table(&cfg.r3_table));
    }
    if let Some(n) = &p.norm {
        raw.c = Some(s(&n.c));
        raw.u = Some(ss(&n.u));
        raw.v = Some(ss(&n.v));
        raw.d = Some(ss(&n.d));
        raw.e = Some(ss(&n.e));
        raw.directions =
            Some(n.directions.iter().map(|d| RawDirection { du: ss(&d.du), dv: ss(&d.dv) }).collect());
    }
    raw
}
