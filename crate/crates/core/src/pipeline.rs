//! End-to-end drivers: building relation sets from the expansion pipelines
//! and checking the golden tables against them.

use std::collections::BTreeMap;

use crate::kappa::GenusContext;
use crate::oracle::{golden_tables, GoldenEntry, OracleError};
use crate::points::enumerate_multipliers;
use crate::omega::OmegaPower;
use crate::solver::RelationSet;

/// A relation set together with the route that produced it.
#[derive(Clone, Debug)]
pub struct LabelledSet {
    pub label: String,
    pub set: RelationSet,
}

/// Runs the pipelines for the given point counts: for each n the plain
/// expansion, then one set per extra multiplier degree up to
/// `max_extra_degree`, pooling all multiplier monomials of that degree.
pub fn standard_sets(
    ctx: &GenusContext,
    point_counts: &[u32],
    max_extra_degree: u32,
) -> Vec<LabelledSet> {
    let mut out = Vec::new();
    for &n in point_counts {
        if ctx.genus() + 1 < n {
            continue;
        }
        let power = OmegaPower::compute(ctx, n);
        let base_degree = ctx.genus() + 1 - n;

        let rvm = power.pushforward(None, true);
        let mut set = RelationSet::new(*ctx, base_degree);
        set.absorb(&rvm);
        out.push(LabelledSet {
            label: format!("n={}", n),
            set,
        });

        for extra in 1..=max_extra_degree {
            let mut set = RelationSet::new(*ctx, base_degree + extra);
            for mult in enumerate_multipliers(n, extra) {
                let rvm = power.pushforward(Some(&mult), true);
                set.absorb(&rvm);
            }
            if !set.rows().is_empty() {
                out.push(LabelledSet {
                    label: format!("n={} with multipliers of extra degree {}", n, extra),
                    set,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryStatus {
    Found { route: String },
    Missing { note: String },
}

#[derive(Clone, Debug)]
pub struct VerifyEntry {
    pub entry: GoldenEntry,
    pub status: EntryStatus,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub genus: u32,
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn all_found(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.status, EntryStatus::Found { .. }))
    }

    pub fn lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| match &e.status {
                EntryStatus::Found { route } => {
                    format!("FOUND   {}  via {}", e.entry.format_line(self.genus), route)
                }
                EntryStatus::Missing { note } => {
                    format!("MISSING {}  ({})", e.entry.format_line(self.genus), note)
                }
            })
            .collect()
    }
}

/// Checks every golden entry for genus `g` against the supplied sets,
/// lifting lower-degree sets by ideal extension where needed. Each FOUND
/// line names the route that produced the relation.
pub fn verify(g: u32, sets: &[LabelledSet]) -> Result<VerifyReport, OracleError> {
    let table = golden_tables(g)?;

    // candidate (route, set) lists per target degree
    let mut by_degree: BTreeMap<u32, Vec<(String, RelationSet)>> = BTreeMap::new();
    for entry in &table.entries {
        let degree = entry.degree;
        if by_degree.contains_key(&degree) {
            continue;
        }
        let mut list = Vec::new();
        for ls in sets {
            if ls.set.degree() == degree {
                list.push((ls.label.clone(), ls.set.clone()));
            } else if ls.set.degree() < degree {
                let ext = ls.set.ideal_extend(degree);
                if !ext.rows().is_empty() {
                    list.push((
                        format!("{} + ideal extension from degree {}", ls.label, ls.set.degree()),
                        ext,
                    ));
                }
            }
        }
        if list.len() > 1 {
            let mut combined = RelationSet::new(*sets[0].set.ctx(), degree);
            for (_, s) in &list {
                combined.merge(s);
            }
            list.push(("combination of all supplied routes".to_string(), combined));
        }
        by_degree.insert(degree, list);
    }

    let mut entries = Vec::new();
    for entry in &table.entries {
        let relation = entry.relation();
        let mut status = EntryStatus::Missing {
            note: "not in the span of any supplied route; may require n=4".to_string(),
        };
        for (route, set) in by_degree.get_mut(&entry.degree).unwrap().iter_mut() {
            if set.span_contains_poly(&relation) {
                status = EntryStatus::Found {
                    route: route.clone(),
                };
                break;
            }
        }
        entries.push(VerifyEntry {
            entry: entry.clone(),
            status,
        });
    }

    Ok(VerifyReport { genus: g, entries })
}
