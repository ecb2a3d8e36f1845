//! Exhaustive enumeration of small skeleton maps, and the theorem checks run
//! over every enumerated instance.
//!
//! Enumeration sweeps every rotation `sigma` on `2E` darts with the edge
//! involution fixed to `(0 1)(2 3)...`, keeps the connected maps of the
//! requested genus and deduplicates them by canonical form. Instance classes
//! are map-isomorphism classes (orientation-preserving homeomorphism), which
//! is coarser than isotopy on the torus and beyond.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cobordism::{canonical_reduced, reduce, replay_states, Strategy};
use crate::field_graph::{
    derive_sink_skeleton, duality_check, flow_certificate, is_saddled_triangulation, poincare_hopf_residual,
    reconstruct_field_graph, validate_field_graph, SkeletonMap,
};
use crate::io::SkeletonFile;
use crate::surface_map::{canonical_form, map_isomorphic, CombinatorialMap};

/// Largest edge count the sweep accepts: `10!` rotations.
pub const MAX_CENSUS_EDGES: usize = 5;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census with {requested} edges exceeds the enumeration wall of {MAX_CENSUS_EDGES}")]
    BudgetExceeded { requested: usize },
    #[error("check `{check}` failed on instance {instance} (counterexample written to {path})")]
    CheckFailed { check: String, instance: usize, path: PathBuf },
    #[error("check `{check}` failed on instance {instance}; writing the counterexample failed: {source}")]
    CounterexampleWrite {
        check: String,
        instance: usize,
        #[source]
        source: std::io::Error,
    },
}

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Canonical forms of every connected genus-`genus` map with exactly `edges`
/// edges. The sweep is split on `sigma(0)` for parallelism.
fn forms_with_edges(edges: usize, genus: usize) -> BTreeSet<Vec<u8>> {
    if edges == 0 {
        return if genus == 0 { BTreeSet::from([canonical_form(&CombinatorialMap::point())]) } else { BTreeSet::new() };
    }
    let n = 2 * edges;
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut found = BTreeSet::new();
            let rest: Vec<usize> = (0..n).filter(|&x| x != first).collect();
            for_each_permutation(n - 1, |p| {
                let mut sigma = Vec::with_capacity(n);
                sigma.push(first);
                sigma.extend(p.iter().map(|&i| rest[i]));
                if let Ok(m) = CombinatorialMap::from_sigma(sigma) {
                    if m.genus() == genus {
                        found.insert(canonical_form(&m));
                    }
                }
            });
            found
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}

/// All connected maps with at most `max_edges` edges and the given genus, one
/// per isomorphism class, ordered by edge count and then canonical form.
pub fn enumerate_maps(max_edges: usize, genus: usize) -> Result<Vec<CombinatorialMap>, CensusError> {
    if max_edges > MAX_CENSUS_EDGES {
        return Err(CensusError::BudgetExceeded { requested: max_edges });
    }
    let mut out = Vec::new();
    for e in 0..=max_edges {
        for form in forms_with_edges(e, genus) {
            out.push(crate::surface_map::map_from_canonical_form(&form).expect("census forms decode"));
        }
    }
    Ok(out)
}

pub fn enumerate_skeletons(max_edges: usize, genus: usize) -> Result<Vec<SkeletonMap>, CensusError> {
    Ok(enumerate_maps(max_edges, genus)?.into_iter().map(SkeletonMap::sink).collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremTallies {
    pub poincare_hopf: usize,
    pub validation: usize,
    pub one_source_per_face: usize,
    pub skeleton_connected: usize,
    pub triangulation: usize,
    pub flow_certificate: usize,
    pub duality: usize,
    pub round_trip: usize,
    pub trace_replay: usize,
    pub genus_invariance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCountRow {
    pub edges: usize,
    pub isomorphism_classes: usize,
    /// Distinct terminal maps reached by reduction. Map-level only: equals
    /// the number of cobordism classes for genus 0, an upper bound otherwise.
    pub terminal_classes: usize,
    pub reduction_failures: usize,
    pub terminal_not_canonical: usize,
    pub tallies: TheoremTallies,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub genus: usize,
    pub max_edges: usize,
    pub equivalence: String,
    pub rows: Vec<EdgeCountRow>,
    pub total_instances: usize,
    /// Distinct terminal maps over the whole census.
    pub cobordism_classes: usize,
}

/// Outcome of every check on a single instance.
#[derive(Debug, Clone, Default)]
struct InstanceOutcome {
    tallies: TheoremTallies,
    terminal: Option<Vec<u8>>,
    terminal_canonical: bool,
    first_failure: Option<&'static str>,
}

fn check_instance(s: &SkeletonMap) -> InstanceOutcome {
    let mut out = InstanceOutcome::default();
    let Ok(fg) = reconstruct_field_graph(s) else {
        out.first_failure = Some("reconstruct");
        return out;
    };
    let t = &mut out.tallies;
    t.poincare_hopf = usize::from(poincare_hopf_residual(&fg) == 0);
    t.validation = usize::from(validate_field_graph(&fg).valid);
    let counts = fg.counts();
    if let Ok(derived) = derive_sink_skeleton(&fg) {
        t.skeleton_connected = 1;
        t.one_source_per_face = usize::from(derived.skeleton.map.num_faces() == counts.sources);
        t.round_trip = usize::from(map_isomorphic(&derived.skeleton.map, &s.map).is_some());
    }
    let needs_triangles = counts.saddles >= 1;
    t.triangulation = usize::from(is_saddled_triangulation(&fg).is_saddled_triangulation == needs_triangles);
    t.flow_certificate = usize::from(match flow_certificate(&fg) {
        Ok(cert) => cert.triangles.len() == fg.map().num_faces(),
        Err(_) => !needs_triangles,
    });
    t.duality = usize::from(duality_check(&fg));

    match reduce(s, Strategy::Phased) {
        Ok(trace) => match replay_states(s, &trace) {
            Ok(states) => {
                out.tallies.trace_replay = 1;
                let g = s.map.genus();
                out.tallies.genus_invariance = usize::from(states.iter().all(|st| st.map.genus() == g));
                let terminal = states.last().expect("non-empty");
                out.terminal_canonical = map_isomorphic(&terminal.map, &canonical_reduced(g).map).is_some();
                out.terminal = Some(canonical_form(&terminal.map));
            }
            Err(_) => out.first_failure = Some("trace_replay"),
        },
        Err(_) => out.first_failure = Some("reduce"),
    }
    let t = &out.tallies;
    let checks = [
        (t.poincare_hopf, "poincare_hopf"),
        (t.validation, "validation"),
        (t.one_source_per_face, "one_source_per_face"),
        (t.skeleton_connected, "skeleton_connected"),
        (t.triangulation, "triangulation"),
        (t.flow_certificate, "flow_certificate"),
        (t.duality, "duality"),
        (t.round_trip, "round_trip"),
        (t.trace_replay, "trace_replay"),
        (t.genus_invariance, "genus_invariance"),
    ];
    if out.first_failure.is_none() {
        out.first_failure = checks.iter().find(|(ok, _)| *ok != 1).map(|&(_, what)| what);
    }
    out
}

fn write_counterexample(dir: &Path, genus: usize, index: usize, s: &SkeletonMap) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("counterexample_g{genus}_{index}.json"));
    let body = serde_json::to_string_pretty(&SkeletonFile::from(s)).expect("skeleton serializes");
    std::fs::write(&path, body)?;
    Ok(path)
}

/// Runs every theorem check over the census. The first failing instance
/// aborts the run and is written to `counterexample_dir`. Reduction must end
/// at the canonical reduced map for genus 0 and 1; for higher genus the
/// number of distinct terminal maps is only reported.
pub fn verify_theorems(genus: usize, max_edges: usize, counterexample_dir: &Path) -> Result<CensusReport, CensusError> {
    let instances = enumerate_skeletons(max_edges, genus)?;
    let outcomes: Vec<InstanceOutcome> = instances.par_iter().map(check_instance).collect();

    let mut rows: BTreeMap<usize, EdgeCountRow> = BTreeMap::new();
    let mut all_terminals = BTreeSet::new();
    let mut row_terminals: BTreeMap<usize, BTreeSet<Vec<u8>>> = BTreeMap::new();
    for (i, (s, o)) in instances.iter().zip(&outcomes).enumerate() {
        let strict = genus <= 1;
        let failure = o.first_failure.or((strict && !o.terminal_canonical).then_some("terminal_canonical"));
        if let Some(check) = failure {
            return Err(match write_counterexample(counterexample_dir, genus, i, s) {
                Ok(path) => CensusError::CheckFailed { check: check.to_string(), instance: i, path },
                Err(source) => CensusError::CounterexampleWrite { check: check.to_string(), instance: i, source },
            });
        }
        let e = s.map.num_edges();
        let row = rows.entry(e).or_insert_with(|| EdgeCountRow {
            edges: e,
            isomorphism_classes: 0,
            terminal_classes: 0,
            reduction_failures: 0,
            terminal_not_canonical: 0,
            tallies: TheoremTallies::default(),
        });
        row.isomorphism_classes += 1;
        if !o.terminal_canonical {
            row.terminal_not_canonical += 1;
        }
        if let Some(t) = &o.terminal {
            row_terminals.entry(e).or_default().insert(t.clone());
            all_terminals.insert(t.clone());
        } else {
            row.reduction_failures += 1;
        }
        let (a, b) = (&mut row.tallies, &o.tallies);
        a.poincare_hopf += b.poincare_hopf;
        a.validation += b.validation;
        a.one_source_per_face += b.one_source_per_face;
        a.skeleton_connected += b.skeleton_connected;
        a.triangulation += b.triangulation;
        a.flow_certificate += b.flow_certificate;
        a.duality += b.duality;
        a.round_trip += b.round_trip;
        a.trace_replay += b.trace_replay;
        a.genus_invariance += b.genus_invariance;
    }
    for (e, row) in rows.iter_mut() {
        row.terminal_classes = row_terminals.get(e).map_or(0, BTreeSet::len);
    }
    Ok(CensusReport {
        genus,
        max_edges,
        equivalence: "orientation-preserving map isomorphism (not isotopy)".to_string(),
        total_instances: instances.len(),
        cobordism_classes: all_terminals.len(),
        rows: rows.into_values().collect(),
    })
}
