//! Certificate file format, structural validation, and the verification
//! pipeline. A certificate is self-contained: problem parameters, the
//! claimed bound, the admissible-graph list, the types with their flag
//! lists, and one R Q' R^T block per type. Verification re-derives
//! everything it can rather than trusting the file.

use crate::constructions::{sharp_list_from_pattern, PatternGraph};
use crate::enumerate::{admissible_graphs, enumerate_flags, FlagSpec, TypeSpec};
use crate::exact::{rat_from_str, rat_to_string, PsdBlock, Rat};
use crate::flagcalc::{check_forced_kernel, derive_bound, CertContext};
use crate::graph::SmallGraph;
use crate::{Error, Result, CONVENTION};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub k: usize,
    pub l: usize,
    /// N: the order of the admissible-graph universe.
    pub order: usize,
    #[serde(default)]
    pub extra_forbidden: Vec<String>,
    pub convention: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub problem: ProblemSpec,
    /// Rational string.
    pub claimed_bound: String,
    pub admissible_graphs: Vec<String>,
    pub types: Vec<String>,
    /// Per-type flag-string lists, in canonical-key order.
    pub flags: Vec<Vec<String>>,
    /// Per-type PSD blocks; blocks[i] belongs to types[i].
    pub blocks: Vec<PsdBlock>,
}

fn cert_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Certificate {
        path: path.to_string(),
        reason: reason.into(),
    }
}

impl Certificate {
    /// Parse and structurally validate a certificate from JSON bytes.
    /// Validation covers the schema, the convention string, parsability and
    /// admissibility of every listed object, canonical form of keys, parity
    /// of type orders, and block dimensions. Completeness of the lists is a
    /// verification stage, not a parse condition.
    pub fn parse(bytes: &[u8]) -> Result<Certificate> {
        let cert: Certificate = serde_json::from_slice(bytes)?;
        cert.validate()?;
        Ok(cert)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Certificate> {
        Self::parse(&std::fs::read(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if p.convention != CONVENTION {
            return Err(cert_err(
                "problem.convention",
                format!("expected {CONVENTION:?}, got {:?}", p.convention),
            ));
        }
        if p.k < 1 {
            return Err(cert_err("problem.k", "k must be at least 1"));
        }
        if p.l < 2 {
            return Err(cert_err("problem.l", "l must be at least 2"));
        }
        if p.order < 1 || p.order > 10 {
            return Err(cert_err("problem.order", "order must be in 1..=10"));
        }
        let forbidden = self.forbidden()?;
        rat_from_str(&self.claimed_bound)
            .map_err(|e| cert_err("claimed_bound", e.to_string()))?;

        for (i, s) in self.admissible_graphs.iter().enumerate() {
            let path = format!("admissible_graphs[{i}]");
            let g = SmallGraph::parse(s).map_err(|e| cert_err(&path, e.to_string()))?;
            if g.order() != p.order {
                return Err(cert_err(&path, format!("order {} != {}", g.order(), p.order)));
            }
            if g.independence_number() >= p.l {
                return Err(cert_err(&path, "graph is not admissible"));
            }
            if forbidden.iter().any(|f| g.contains_induced(f)) {
                return Err(cert_err(&path, "graph contains a forbidden induced subgraph"));
            }
            if g.canonical_key().0 != *s {
                return Err(cert_err(&path, "graph string is not in canonical form"));
            }
        }

        if self.flags.len() != self.types.len() || self.blocks.len() != self.types.len() {
            return Err(cert_err(
                "types",
                "types, flags and blocks must have equal lengths",
            ));
        }
        let mut seen_types = std::collections::HashSet::new();
        for (t, s) in self.types.iter().enumerate() {
            let path = format!("types[{t}]");
            let g = SmallGraph::parse(s).map_err(|e| cert_err(&path, e.to_string()))?;
            let v = g.order();
            if v >= p.order || (p.order - v) % 2 != 0 {
                return Err(cert_err(
                    &path,
                    format!("type order {v} must leave N - v positive even (N = {})", p.order),
                ));
            }
            if v > 0 && g.independence_number() >= p.l {
                return Err(cert_err(&path, "type is not admissible"));
            }
            if forbidden.iter().any(|f| g.contains_induced(f)) {
                return Err(cert_err(&path, "type contains a forbidden induced subgraph"));
            }
            if g.canonical_key().0 != *s {
                return Err(cert_err(&path, "type string is not in canonical form"));
            }
            if !seen_types.insert(g.canonical_key()) {
                return Err(cert_err(&path, "type graphs must be pairwise non-isomorphic"));
            }
            let m = (p.order + v) / 2;
            for (j, fs) in self.flags[t].iter().enumerate() {
                let fpath = format!("flags[{t}][{j}]");
                let fg = SmallGraph::parse(fs).map_err(|e| cert_err(&fpath, e.to_string()))?;
                if fg.order() != m {
                    return Err(cert_err(&fpath, format!("flag order {} != {m}", fg.order())));
                }
                if fg.independence_number() >= p.l {
                    return Err(cert_err(&fpath, "flag is not admissible"));
                }
                if fg.induced((1u32 << v) - 1) != g {
                    return Err(cert_err(&fpath, "labeled prefix does not induce the type"));
                }
                if fg.canonical_string_fixed(v) != *fs {
                    return Err(cert_err(&fpath, "flag string is not in canonical form"));
                }
            }
            let block = &self.blocks[t];
            if block.dimension() != self.flags[t].len() {
                return Err(cert_err(
                    &format!("blocks[{t}]"),
                    format!(
                        "block dimension {} != flag count {}",
                        block.dimension(),
                        self.flags[t].len()
                    ),
                ));
            }
            block
                .assemble()
                .map_err(|e| cert_err(&format!("blocks[{t}]"), e.to_string()))?;
        }
        Ok(())
    }

    pub fn forbidden(&self) -> Result<Vec<SmallGraph>> {
        self.problem
            .extra_forbidden
            .iter()
            .enumerate()
            .map(|(i, s)| {
                SmallGraph::parse(s)
                    .map_err(|e| cert_err(&format!("problem.extra_forbidden[{i}]"), e.to_string()))
            })
            .collect()
    }

    pub fn claimed(&self) -> Result<Rat> {
        rat_from_str(&self.claimed_bound)
    }

    /// Assemble the calculus view: parsed graphs, types, flags, Q matrices.
    pub fn context(&self) -> Result<CertContext> {
        let graphs: Result<Vec<SmallGraph>> = self
            .admissible_graphs
            .iter()
            .map(|s| SmallGraph::parse(s))
            .collect();
        let types: Result<Vec<TypeSpec>> = self
            .types
            .iter()
            .map(|s| Ok(TypeSpec { graph: SmallGraph::parse(s)? }))
            .collect();
        let types = types?;
        let flags: Result<Vec<Vec<FlagSpec>>> = self
            .flags
            .iter()
            .zip(&types)
            .map(|(list, tau)| {
                list.iter()
                    .map(|s| {
                        Ok(FlagSpec {
                            graph: SmallGraph::parse(s)?,
                            labeled: tau.order(),
                        })
                    })
                    .collect()
            })
            .collect();
        let q: Result<Vec<_>> = self.blocks.iter().map(|b| b.assemble()).collect();
        Ok(CertContext {
            k: self.problem.k,
            l: self.problem.l,
            n: self.problem.order,
            graphs: graphs?,
            types,
            flags: flags?,
            q: q?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub stages: Vec<StageReport>,
    pub claimed_bound: String,
    pub derived_bound: Option<String>,
    /// Canonical keys of the sharp graphs (equality in the main inequality).
    pub sharp: Vec<String>,
    /// Per-graph slack p(K_k,G_i) - alpha_i - c', aligned with the
    /// certificate's admissible list.
    pub slack: Vec<String>,
    pub pass: bool,
}

/// The four-stage verification pipeline: (1) the admissible list is exactly
/// the enumerated universe, (2) each flag list is exactly the enumerated
/// flag list of its type, (3) every block assembles to an exactly PSD
/// matrix, (4) the derived bound meets the claim.
pub fn verify(cert: &Certificate) -> Result<VerificationReport> {
    let mut stages = Vec::new();
    let mut pass = true;

    let forbidden = cert.forbidden()?;
    let ctx = cert.context()?;

    // stage 1: admissible universe
    let expected = admissible_graphs(cert.problem.order, cert.problem.l, &forbidden)?;
    let listed: std::collections::BTreeSet<String> =
        cert.admissible_graphs.iter().cloned().collect();
    let expected_set: std::collections::BTreeSet<String> =
        expected.iter().map(|k| k.0.clone()).collect();
    let stage1 = listed == expected_set && listed.len() == cert.admissible_graphs.len();
    let detail = if stage1 {
        format!("{} graphs", expected.len())
    } else {
        let missing: Vec<&String> = expected_set.difference(&listed).collect();
        let extra: Vec<&String> = listed.difference(&expected_set).collect();
        format!("missing {missing:?}, extra {extra:?}")
    };
    stages.push(StageReport {
        stage: "admissible-graphs".into(),
        pass: stage1,
        detail,
    });
    pass &= stage1;

    // stage 2: flag lists
    let mut stage2 = true;
    let mut detail2 = Vec::new();
    for (t, tau) in ctx.types.iter().enumerate() {
        let m = (cert.problem.order + tau.order()) / 2;
        let expected = enumerate_flags(tau, m, cert.problem.l, &forbidden)?;
        let expected_keys: Vec<String> = expected.iter().map(|f| f.key()).collect();
        if expected_keys != cert.flags[t] {
            stage2 = false;
            detail2.push(format!(
                "type {} expects {} flags, file lists {}",
                cert.types[t],
                expected_keys.len(),
                cert.flags[t].len()
            ));
        }
    }
    stages.push(StageReport {
        stage: "flag-lists".into(),
        pass: stage2,
        detail: if stage2 {
            format!("{} types", ctx.types.len())
        } else {
            detail2.join("; ")
        },
    });
    pass &= stage2;

    // stage 3: PSD blocks (decomposition is PSD by construction; re-verify
    // by exact LDL^T, both paths must agree)
    let mut stage3 = true;
    let mut detail3 = Vec::new();
    for (t, q) in ctx.q.iter().enumerate() {
        match q.check_psd() {
            Ok(true) => {}
            Ok(false) => {
                stage3 = false;
                detail3.push(format!("block {t} failed the exact PSD re-check"));
            }
            Err(e) => {
                stage3 = false;
                detail3.push(format!("block {t}: {e}"));
            }
        }
    }
    stages.push(StageReport {
        stage: "psd-blocks".into(),
        pass: stage3,
        detail: if stage3 {
            format!("{} blocks", ctx.q.len())
        } else {
            detail3.join("; ")
        },
    });
    pass &= stage3;

    // stage 4: bound derivation
    let claimed = cert.claimed()?;
    let (derived_bound, sharp, slack, stage4, detail4) = if stages[..2].iter().all(|s| s.pass) {
        let report = derive_bound(&ctx, &claimed)?;
        let ok = report.verified();
        let detail = if ok {
            format!("derived bound {}", rat_to_string(&report.derived_bound))
        } else {
            let names: Vec<String> = report
                .violating_indices()
                .iter()
                .map(|&i| cert.admissible_graphs[i].clone())
                .collect();
            format!(
                "derived bound {} below claimed {}; violating graphs {:?}",
                rat_to_string(&report.derived_bound),
                cert.claimed_bound,
                names
            )
        };
        (
            Some(rat_to_string(&report.derived_bound)),
            report
                .sharp_indices
                .iter()
                .map(|&i| cert.admissible_graphs[i].clone())
                .collect(),
            report.slacks().iter().map(rat_to_string).collect(),
            ok,
            detail,
        )
    } else {
        (
            None,
            Vec::new(),
            Vec::new(),
            false,
            "skipped: earlier stages failed".to_string(),
        )
    };
    stages.push(StageReport {
        stage: "bound".into(),
        pass: stage4,
        detail: detail4,
    });
    pass &= stage4;

    Ok(VerificationReport {
        stages,
        claimed_bound: cert.claimed_bound.clone(),
        derived_bound,
        sharp,
        slack,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpComparison {
    /// Sharp graphs according to the certificate's bound derivation.
    pub certificate_sharp: Vec<String>,
    /// Admissible graphs embedding into expansions of the pattern.
    pub construction_sharp: Vec<String>,
    /// Forced-sharpness containment: construction-sharp ⊆ certificate-sharp.
    pub containment: bool,
    pub forced_kernel_pass: bool,
}

/// Compares the certificate's sharp set against the construction's sharp
/// list and checks the forced-kernel condition on the pattern.
pub fn sharp_report(cert: &Certificate, pattern: &PatternGraph) -> Result<SharpComparison> {
    let ctx = cert.context()?;
    let bound = derive_bound(&ctx, &cert.claimed()?)?;
    let certificate_sharp: Vec<String> = bound
        .sharp_indices
        .iter()
        .map(|&i| cert.admissible_graphs[i].clone())
        .collect();
    // restrict to the certificate's own universe so extra_forbidden is honored
    let embeddable: std::collections::BTreeSet<String> =
        sharp_list_from_pattern(pattern, cert.problem.order, cert.problem.l)?
            .into_iter()
            .map(|k| k.0)
            .collect();
    let construction_sharp: Vec<String> = cert
        .admissible_graphs
        .iter()
        .filter(|s| embeddable.contains(*s))
        .cloned()
        .collect();
    let sharp_set: std::collections::BTreeSet<&String> = certificate_sharp.iter().collect();
    let containment = construction_sharp.iter().all(|s| sharp_set.contains(s));
    let kernel = check_forced_kernel(&ctx, pattern)?;
    Ok(SharpComparison {
        certificate_sharp,
        construction_sharp,
        containment,
        forced_kernel_pass: kernel.pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn goodman_json() -> String {
        serde_json::json!({
            "problem": {
                "k": 3, "l": 3, "order": 3,
                "extra_forbidden": [],
                "convention": "count-v1"
            },
            "claimed_bound": "1/4",
            "admissible_graphs": ["3:12", "3:1213", "3:121323"],
            "types": ["1:"],
            "flags": [["2:", "2:12"]],
            "blocks": [{"qdash": ["1/8"], "r": [["1"], ["-1"]]}]
        })
        .to_string()
    }

    #[test]
    fn goodman_parses_and_verifies() {
        let cert = Certificate::parse(goodman_json().as_bytes()).unwrap();
        assert_eq!(cert.problem.order, 3);
        assert_eq!(cert.admissible_graphs.len(), 3);
        assert_eq!(cert.flags[0].len(), 2);
        let report = verify(&cert).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.derived_bound.as_deref(), Some("1/4"));
        assert_eq!(report.sharp.len(), 3);
        assert!(report.slack.iter().all(|s| s == "0"));
    }

    #[test]
    fn zero_qdash_rejected() {
        let bad = goodman_json().replace("\"1/8\"", "\"0\"");
        let err = Certificate::parse(bad.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("blocks[0]"), "{err}");
    }

    #[test]
    fn incomplete_admissible_list_fails_stage_one() {
        let mut v: serde_json::Value = serde_json::from_str(&goodman_json()).unwrap();
        v["admissible_graphs"] = serde_json::json!(["3:12", "3:1213"]);
        let cert = Certificate::parse(v.to_string().as_bytes()).unwrap();
        let report = verify(&cert).unwrap();
        assert!(!report.pass);
        assert!(!report.stages[0].pass);
        assert!(report.stages[0].detail.contains("3:121323"));
    }

    #[test]
    fn inflated_claim_fails_bound_stage() {
        let bad = goodman_json().replace("\"1/4\"", "\"1/3\"");
        let cert = Certificate::parse(bad.as_bytes()).unwrap();
        let report = verify(&cert).unwrap();
        assert!(!report.pass);
        let bound_stage = report.stages.iter().find(|s| s.stage == "bound").unwrap();
        assert!(!bound_stage.pass);
        assert!(bound_stage.detail.contains("3:12"), "{}", bound_stage.detail);
    }

    #[test]
    fn verify_is_order_insensitive() {
        let mut v: serde_json::Value = serde_json::from_str(&goodman_json()).unwrap();
        v["admissible_graphs"] = serde_json::json!(["3:121323", "3:12", "3:1213"]);
        let cert = Certificate::parse(v.to_string().as_bytes()).unwrap();
        let report = verify(&cert).unwrap();
        assert!(report.pass);
        assert_eq!(report.derived_bound.as_deref(), Some("1/4"));
    }

    #[test]
    fn deleting_the_block_lowers_the_bound() {
        let mut v: serde_json::Value = serde_json::from_str(&goodman_json()).unwrap();
        v["blocks"] = serde_json::json!([{"qdash": [], "r": [[], []]}]);
        v["claimed_bound"] = serde_json::json!("0");
        let cert = Certificate::parse(v.to_string().as_bytes()).unwrap();
        let report = verify(&cert).unwrap();
        assert!(report.pass);
        assert_eq!(report.derived_bound.as_deref(), Some("0"));
    }

    #[test]
    fn sharp_report_goodman() {
        use crate::constructions::PatternMode;
        let cert = Certificate::parse(goodman_json().as_bytes()).unwrap();
        let ok2 = PatternGraph::uniform(SmallGraph::empty(2), PatternMode::Expansion);
        let cmp = sharp_report(&cert, &ok2).unwrap();
        assert!(cmp.containment);
        assert!(cmp.forced_kernel_pass);
        // K3 and one-edge embed into two-clique expansions; P3 does not
        assert_eq!(cmp.construction_sharp, vec!["3:12", "3:121323"]);
        assert_eq!(cmp.certificate_sharp.len(), 3);
    }

    #[test]
    fn malformed_inputs_error_with_path() {
        let cases = [
            ("\"count-v1\"", "\"other\"", "problem.convention"),
            ("\"1:\"", "\"2:12\"", "types[0]"), // wrong parity type
        ];
        for (from, to, path) in cases {
            let bad = goodman_json().replace(from, to);
            let err = Certificate::parse(bad.as_bytes()).unwrap_err().to_string();
            assert!(err.contains(path), "{err}");
        }
        assert!(Certificate::parse(b"not json").is_err());
    }
}
