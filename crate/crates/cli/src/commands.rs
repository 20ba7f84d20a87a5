//! One function per subcommand. Each loads its inputs, runs the computation
//! and returns a verdict with a JSON payload.

use std::collections::BTreeSet;
use std::sync::Arc;

use anyhow::{bail, Context};
use mlakit_core::abelian::{
    action_terms_of, derivations, h0_set, principal_derivations, shift_map, stabilizing_automorphisms,
};
use mlakit_core::correspondence::verify_correspondence;
use mlakit_core::extension::CocycleTables;
use mlakit_core::format::{self, AlgebraFile};
use mlakit_core::substructures::{all_ideals, centers, classify_series};
use mlakit_core::wells::verify_wells;
use mlakit_core::{
    build_crossed_product, catalog, check_compatibility, check_derived_identities, classify_extensions,
    cocycles_equivalent, h1_group, h2_group, verify_five_term, ActionTerms, CensusOptions, Cocycle2,
    Extension, FiniteMla, Limits, MlaError,
};
use serde_json::{json, Value};

use crate::report::{InputDigest, Verdict};

/// What a subcommand hands back before it is wrapped in a report.
pub struct Outcome {
    pub verdict: Verdict,
    pub payload: Value,
    pub counterexamples: Vec<Value>,
}

impl Outcome {
    fn pass(payload: Value) -> Self {
        Outcome {
            verdict: Verdict::Pass,
            payload,
            counterexamples: Vec::new(),
        }
    }

    fn judged(ok: bool, payload: Value, counterexamples: Vec<Value>) -> Self {
        Outcome {
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            payload,
            counterexamples,
        }
    }
}

/// Reads command inputs and records a digest of each.
#[derive(Default)]
pub struct Inputs {
    pub digests: Vec<InputDigest>,
}

impl Inputs {
    /// `catalog:<key>` and inline JSON are taken literally; anything else is a path.
    fn text(&mut self, arg: &str) -> anyhow::Result<String> {
        let trimmed = arg.trim_start();
        let text = if arg.starts_with("catalog:") {
            serde_json::to_string(arg)?
        } else if trimmed.starts_with('{') || trimmed.starts_with('"') || arg == "trivial" {
            arg.to_string()
        } else {
            std::fs::read_to_string(arg).with_context(|| format!("cannot read `{arg}`"))?
        };
        self.digests.push(InputDigest::new(arg, text.as_bytes()));
        Ok(text)
    }

    pub fn algebra(&mut self, arg: &str) -> anyhow::Result<Arc<FiniteMla>> {
        Ok(Arc::new(format::parse_algebra(&self.text(arg)?)?))
    }

    pub fn action(&mut self, arg: &str, q: &Arc<FiniteMla>, i: &Arc<FiniteMla>) -> anyhow::Result<ActionTerms> {
        Ok(format::parse_action(&self.text(arg)?, q.clone(), i.clone())?)
    }

    pub fn extension(&mut self, arg: &str) -> anyhow::Result<Extension> {
        Ok(format::parse_extension(&self.text(arg)?)?)
    }

    /// A cocycle file; with a datum the file's own algebras are ignored.
    pub fn cocycle(&mut self, arg: &str, datum: Option<(&Arc<FiniteMla>, &Arc<FiniteMla>)>) -> anyhow::Result<Cocycle2> {
        let text = self.text(arg)?;
        Ok(match datum {
            Some((q, i)) => {
                let tables: CocycleTables =
                    serde_json::from_str(&text).map_err(|e| MlaError::Format(e.to_string()))?;
                format::cocycle_from_tables(&tables, q.clone(), i.clone())?
            }
            None => format::parse_cocycle(&text)?,
        })
    }
}

pub fn verify(inputs: &mut Inputs, arg: &str) -> anyhow::Result<Outcome> {
    match format::parse_algebra(&inputs.text(arg)?) {
        Ok(a) => Ok(Outcome::pass(json!({
            "name": a.name(),
            "order": a.order(),
            "valid": true,
            "abelian_group": a.is_abelian_group(),
            "trivial_bracket": a.has_trivial_bracket(),
        }))),
        Err(MlaError::Invalid(report)) => {
            let counter = report.violations.iter().map(|v| json!(v)).collect();
            Ok(Outcome::judged(
                false,
                json!({ "valid": false, "violations": report.violations.len() }),
                counter,
            ))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn identities(inputs: &mut Inputs, arg: &str) -> anyhow::Result<Outcome> {
    let a = inputs.algebra(arg)?;
    let report = check_derived_identities(&a);
    let counter = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| json!({ "identity": c.identity, "witness": c.witness }))
        .collect();
    Ok(Outcome::judged(report.all_passed(), json!(report), counter))
}

pub fn centers_cmd(inputs: &mut Inputs, arg: &str) -> anyhow::Result<Outcome> {
    let a = inputs.algebra(arg)?;
    let c = centers(&a);
    Ok(Outcome::pass(json!({
        "group_center": c.group_center.members(),
        "left_zero": c.left_zero.members(),
        "null": c.null.members(),
        "algebraic_center": c.algebraic_center.members(),
    })))
}

pub fn ideals(inputs: &mut Inputs, arg: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let a = inputs.algebra(arg)?;
    let list: Vec<Vec<usize>> = all_ideals(&a, limits.max_ideal_order)?
        .iter()
        .map(|s| s.members())
        .collect();
    Ok(Outcome::pass(json!({ "count": list.len(), "ideals": list })))
}

pub fn series(inputs: &mut Inputs, arg: &str) -> anyhow::Result<Outcome> {
    let a = inputs.algebra(arg)?;
    Ok(Outcome::pass(json!(classify_series(&a))))
}

fn datum(inputs: &mut Inputs, args: &[String]) -> anyhow::Result<(Arc<FiniteMla>, Arc<FiniteMla>)> {
    match args {
        [q, i] => Ok((inputs.algebra(q)?, inputs.algebra(i)?)),
        _ => bail!("--datum takes exactly two algebras: <Q> <I>"),
    }
}

pub fn extend(inputs: &mut Inputs, datum_args: Option<&[String]>, cocycle: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let d = datum_args.map(|a| datum(inputs, a)).transpose()?;
    let c = inputs.cocycle(cocycle, d.as_ref().map(|(q, i)| (q, i)))?;
    let report = check_compatibility(&c);
    if !report.is_valid() {
        let counter = report.violations.iter().map(|v| json!(v)).collect();
        return Ok(Outcome::judged(
            false,
            json!({ "compatible": false, "violations": report.violations.len() }),
            counter,
        ));
    }
    let cp = build_crossed_product(&c, limits.max_order)?;
    Ok(Outcome::pass(json!({
        "compatible": true,
        "order": cp.algebra.order(),
        "algebra": AlgebraFile::from_algebra(&cp.algebra),
    })))
}

pub fn census(
    inputs: &mut Inputs,
    datum_args: &[String],
    action: Option<&str>,
    limits: &Limits,
) -> anyhow::Result<Outcome> {
    let (q, i) = datum(inputs, datum_args)?;
    let mut opts = CensusOptions::new(limits);
    if let Some(arg) = action {
        opts = opts.with_action(inputs.action(arg, &q, &i)?);
    }
    let census = classify_extensions(&q, &i, &opts)?;
    let classes: Vec<Value> = census
        .classes
        .iter()
        .map(|c| {
            json!({
                "members": c.members,
                "representative": CocycleTables::from(&c.representative),
            })
        })
        .collect();
    Ok(Outcome::pass(json!({
        "class_count": classes.len(),
        "classes": classes,
        "members_found": census.members_found,
    })))
}

pub fn equiv(
    inputs: &mut Inputs,
    datum_args: Option<&[String]>,
    first: &str,
    second: &str,
    limits: &Limits,
) -> anyhow::Result<Outcome> {
    let d = datum_args.map(|a| datum(inputs, a)).transpose()?;
    let pair = d.as_ref().map(|(q, i)| (q, i));
    let c = inputs.cocycle(first, pair)?;
    let e = inputs.cocycle(second, pair)?;
    let witness = cocycles_equivalent(&c, &e, limits.max_candidates)?;
    Ok(Outcome::pass(json!({
        "equivalent": witness.is_some(),
        "witness": witness,
    })))
}

pub fn h2(inputs: &mut Inputs, datum_args: &[String], action: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let (q, i) = datum(inputs, datum_args)?;
    let chi = inputs.action(action, &q, &i)?;
    let h = h2_group(&chi, limits.max_candidates)?;
    let reps: Vec<Value> = h
        .representatives
        .iter()
        .map(|f| json!({ "T": f.t_table(), "Tf": f.tf_table() }))
        .collect();
    Ok(Outcome::pass(json!({
        "order": h.order(),
        "invariant_factors": h.group.invariant_factors,
        "cocycles": h.cocycles.len(),
        "coboundaries": h.coboundaries.len(),
        "representatives": reps,
    })))
}

pub fn h1(inputs: &mut Inputs, datum_args: &[String], action: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let (q, i) = datum(inputs, datum_args)?;
    let chi = inputs.action(action, &q, &i)?;
    let h = h1_group(&chi, limits.max_candidates)?;
    Ok(Outcome::pass(json!({
        "order": h.order(),
        "invariant_factors": h.group.invariant_factors,
        "h0": h0_set(&chi).members(),
        "derivations": h.derivations.len(),
        "principal": h.principal.len(),
        "representatives": h.representatives,
    })))
}

pub fn derivations_cmd(inputs: &mut Inputs, datum_args: &[String], action: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let (q, i) = datum(inputs, datum_args)?;
    let chi = inputs.action(action, &q, &i)?;
    let ders = derivations(&chi, limits.max_candidates)?;
    let principal = principal_derivations(&chi);
    Ok(Outcome::pass(json!({
        "count": ders.len(),
        "principal_count": principal.len(),
        "derivations": ders,
        "principal": principal,
    })))
}

pub fn stab(inputs: &mut Inputs, extension: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let ext = inputs.extension(extension)?;
    let chi = action_terms_of(&ext)?;
    let ders = derivations(&chi, limits.max_candidates)?;
    let stabs = stabilizing_automorphisms(&ext, limits.max_candidates)?;
    let der_set: BTreeSet<&Vec<usize>> = ders.iter().collect();
    let mut counter = Vec::new();
    for s in &stabs {
        if !der_set.contains(&s.derivation) || shift_map(&ext, &s.derivation) != s.map {
            counter.push(json!({ "automorphism": s.map, "derivation": s.derivation }));
        }
    }
    let image: BTreeSet<&Vec<usize>> = stabs.iter().map(|s| &s.derivation).collect();
    let bijective = counter.is_empty() && image.len() == stabs.len() && image == der_set;
    Ok(Outcome::judged(
        bijective,
        json!({
            "stabilizing_automorphisms": stabs.len(),
            "derivations": ders.len(),
            "bijection": bijective,
            "pairs": stabs,
        }),
        counter,
    ))
}

pub fn correspondence(inputs: &mut Inputs, datum_args: &[String], action: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let (q, i) = datum(inputs, datum_args)?;
    let chi = inputs.action(action, &q, &i)?;
    let report = verify_correspondence(&chi, limits)?;
    Ok(Outcome::judged(report.passed(), json!(report), Vec::new()))
}

pub fn wells(inputs: &mut Inputs, extension: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let ext = inputs.extension(extension)?;
    let report = verify_wells(&ext, limits)?;
    Ok(Outcome::judged(report.passed(), json!(report), Vec::new()))
}

pub fn hs(inputs: &mut Inputs, extension: &str, coeff: &str, action: &str, limits: &Limits) -> anyhow::Result<Outcome> {
    let ext = inputs.extension(extension)?;
    let a = inputs.algebra(coeff)?;
    let chi = inputs.action(action, &ext.total, &a)?;
    let report = verify_five_term(&ext, &chi, limits)?;
    let counter = report
        .junctions
        .iter()
        .filter(|j| !j.holds)
        .map(|j| json!({ "junction": j.name, "witness": j.counterexample }))
        .collect();
    Ok(Outcome::judged(report.passed(), json!(report), counter))
}

pub fn catalog_list() -> Outcome {
    let entries: Vec<Value> = catalog::STANDARD_KEYS
        .iter()
        .map(|k| {
            let a = catalog::build(k).expect("standard keys build");
            json!({ "key": k, "order": a.order() })
        })
        .collect();
    Outcome::pass(json!({ "entries": entries }))
}

pub fn catalog_emit(key: &str) -> anyhow::Result<String> {
    Ok(format::algebra_to_json(&catalog::build(key)?))
}
