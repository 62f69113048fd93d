//! Job configuration, report assembly, export and the on-disk result cache.

mod cache;
mod export;

pub use cache::{cache_dir_from_env, cache_get_or_compute, cache_key, CacheStatus, CachedOutput, CACHE_ENV};
pub use export::{export, parse};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::equivariant_quotient::{Membership, QuotientDescriptor, SolverReport};
use crate::error::{Error, Result};
use crate::loop_space::{nonvanishing, ps_prefix, GeneratorClass, KnownPrefix, Nonvanishing};
use crate::parallel;
use crate::quantum_ring::{QHElement, RingDescriptor};
use crate::quantum_steenrod::EqElement;

pub const DEFAULT_I_MAX: u32 = 5;
pub const MAX_TRUNCATION_ORDER: u32 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    /// `Tot(O(-k) -> CP^m)`
    Oline,
    /// `T*S^n`
    TstarSphere,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Markdown,
}

/// Which parts of the report to compute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Section {
    #[default]
    All,
    Qs,
    Ps,
    Membership,
    Solver,
    Prefixes,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub space: Space,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Largest `i` for the `y^i`, `x y^i` prefix rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_max: Option<u32>,
    #[serde(default = "default_order")]
    pub truncation_order: u32,
    #[serde(default)]
    pub output_format: OutputFormat,
    #[serde(default)]
    pub section: Section,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_path: Option<PathBuf>,
}

fn default_order() -> u32 {
    crate::equivariant_quotient::DEFAULT_TRUNCATION_ORDER
}

impl JobConfig {
    pub fn oline(m: u32, k: u32) -> Self {
        Self {
            space: Space::Oline,
            m: Some(m),
            k: Some(k),
            n: None,
            i_max: None,
            truncation_order: default_order(),
            output_format: OutputFormat::Json,
            section: Section::All,
            cache_path: None,
        }
    }

    pub fn tstar_sphere(n: u32) -> Self {
        Self {
            space: Space::TstarSphere,
            m: None,
            k: None,
            n: Some(n),
            ..Self::oline(0, 0)
        }
    }

    /// `QSTEEN_CACHE`, when set and non-empty, replaces `cache_path`.
    pub fn apply_env(&mut self) {
        if let Some(dir) = cache_dir_from_env() {
            self.cache_path = Some(dir);
        }
    }

    /// Checks parameter applicability and fills defaults.
    pub fn normalized(&self) -> Result<JobConfig> {
        let mut cfg = self.clone();
        if cfg.truncation_order == 0 || cfg.truncation_order > MAX_TRUNCATION_ORDER {
            return Err(Error::config(
                "truncation_order",
                format!("must lie in 1..={MAX_TRUNCATION_ORDER}, got {}", cfg.truncation_order),
            ));
        }
        match cfg.space {
            Space::Oline => {
                for (field, v) in [("n", cfg.n), ("i_max", cfg.i_max)] {
                    if v.is_some() {
                        return Err(Error::config(field, "not applicable to space oline"));
                    }
                }
                let m = cfg.m.ok_or_else(|| Error::config("m", "required for space oline"))?;
                if m == 0 {
                    return Err(Error::config("m", "must be at least 1"));
                }
                let k = *cfg.k.get_or_insert(1);
                if k != 1 {
                    return Err(Error::config(
                        "k",
                        format!("quantum Steenrod corrections are only available for k = 1, got {k}"),
                    ));
                }
                if cfg.section == Section::Prefixes {
                    return Err(Error::config("section", "prefixes belong to space tstar-sphere"));
                }
            }
            Space::TstarSphere => {
                for (field, v) in [("m", cfg.m), ("k", cfg.k)] {
                    if v.is_some() {
                        return Err(Error::config(field, "not applicable to space tstar-sphere"));
                    }
                }
                let n = cfg.n.ok_or_else(|| Error::config("n", "required for space tstar-sphere"))?;
                if n < 2 {
                    return Err(Error::config("n", format!("sphere dimension must be at least 2, got {n}")));
                }
                let i_max = *cfg.i_max.get_or_insert(DEFAULT_I_MAX);
                if i_max > 64 {
                    return Err(Error::config("i_max", format!("at most 64, got {i_max}")));
                }
                if !matches!(cfg.section, Section::All | Section::Prefixes) {
                    return Err(Error::config("section", "only `all` or `prefixes` apply to tstar-sphere"));
                }
            }
        }
        Ok(cfg)
    }

    fn wants(&self, s: Section) -> bool {
        self.section == Section::All || self.section == s
    }
}

/// One row of a square table: the input class and its square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareRow {
    pub class: String,
    pub value: EqElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipRow {
    pub element: String,
    #[serde(flatten)]
    pub verdict: Membership,
    pub normal_form: EqElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixRow {
    pub class: GeneratorClass,
    pub prefix: KnownPrefix,
    pub verdict: Nonvanishing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopReport {
    pub n: u32,
    pub rows: Vec<PrefixRow>,
}

/// Everything a job produced. Absent sections are omitted from JSON, so the
/// empty report exports as `{}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qs: Option<Vec<SquareRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps: Option<Vec<SquareRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membership: Option<Vec<MembershipRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loop_space: Option<LoopReport>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        *self == Report::default()
    }
}

fn x_label(a: u32) -> String {
    match a {
        0 => "1".into(),
        1 => "x".into(),
        _ => format!("x^{a}"),
    }
}

pub fn run_job(cfg: &JobConfig) -> Result<Report> {
    let cfg = cfg.normalized()?;
    match cfg.space {
        Space::Oline => run_oline(&cfg),
        Space::TstarSphere => run_sphere(&cfg),
    }
}

fn run_oline(cfg: &JobConfig) -> Result<Report> {
    let (m, k, order) = (cfg.m.unwrap(), cfg.k.unwrap(), cfg.truncation_order);
    let ring = RingDescriptor::line_bundle(m, k)?;
    let quotient = QuotientDescriptor::new(ring, order)?;
    let mut report = Report {
        ring: Some(ring),
        truncation_order: Some(order),
        ..Report::default()
    };

    if cfg.wants(Section::Qs) {
        let rows = quotient.qs_table().rows();
        report.qs = Some(
            rows.iter()
                .enumerate()
                .map(|(a, v)| SquareRow {
                    class: x_label(a as u32),
                    value: if v.max_h().is_some_and(|h| h > order) { v.truncate(order) } else { v.clone() },
                })
                .collect(),
        );
    }

    if cfg.wants(Section::Ps) {
        let basis: Vec<u32> = (0..m).collect();
        let rows = parallel::try_map(&basis, |&a| {
            Ok::<_, Error>(SquareRow {
                class: x_label(a),
                value: quotient.ps(&QHElement::x_power(ring, a))?,
            })
        })?;
        report.ps = Some(rows);
    }

    if cfg.wants(Section::Membership) {
        let g = quotient.generator().clone();
        let x = EqElement::from_qh(QHElement::x_power(ring, 1), 0);
        let t2 = EqElement::from_qh(QHElement::monomial(ring, 0, 2), 0);
        let qs_xm = quotient.qs_table().power(m)?.clone();
        let probes = vec![
            ("QS(x^m + T)".to_string(), g.clone()),
            ("QS(x^m) + T^2".to_string(), qs_xm.checked_add(&t2)?),
            ("x QS(x^m + T)".to_string(), x.eq_mul(&g)?),
        ];
        let rows = parallel::try_map(&probes, |(label, f)| {
            Ok::<_, Error>(MembershipRow {
                element: label.clone(),
                verdict: quotient.member(f)?,
                normal_form: quotient.normal_form(f)?,
            })
        })?;
        report.membership = Some(rows);
    }

    if cfg.wants(Section::Solver) {
        report.solver = Some(crate::equivariant_quotient::req_constraint_solver(ring)?);
    }
    Ok(report)
}

fn run_sphere(cfg: &JobConfig) -> Result<Report> {
    let (n, i_max) = (cfg.n.unwrap(), cfg.i_max.unwrap());
    let mut classes: Vec<GeneratorClass> = (0..=i_max).map(GeneratorClass::Y).collect();
    classes.push(GeneratorClass::X);
    classes.extend((1..=i_max).map(GeneratorClass::XY));
    let rows = parallel::try_map(&classes, |&class| {
        Ok::<_, Error>(PrefixRow {
            class,
            prefix: ps_prefix(class, n)?,
            verdict: nonvanishing(class, n)?,
        })
    })?;
    Ok(Report {
        loop_space: Some(LoopReport { n, rows }),
        ..Report::default()
    })
}
