//! Per-step edge truncation.

use std::cmp::Ordering;

use crate::expr::{eval, Env, EvalContext, EvalError, FunctionRegistry, Scope};
use crate::store::{ElementId, Store, TypeRef};
use crate::syntax::ast::{OrderKey, SortDirection, TruncationSpec};
use crate::value::{compare_sort_cells, dominant_family, Value};

#[derive(Clone, Debug)]
struct PlanStep {
    /// Indexed by edge type id; `None` applies to every edge.
    applies: Option<Vec<bool>>,
    order: Vec<OrderKey>,
    limit: usize,
}

/// Truncation specs resolved against a store and put in application order:
/// unnamed specs first, then named specs from the root of the supertype
/// chain down to exact types.
#[derive(Clone, Debug, Default)]
pub struct TruncationPlan {
    steps: Vec<PlanStep>,
    unnamed_limit: Option<usize>,
    /// Smallest named limit applying to each edge type.
    type_limits: Vec<Option<usize>>,
}

fn as_limit(n: u64) -> usize {
    usize::try_from(n).unwrap_or(usize::MAX)
}

impl TruncationPlan {
    pub fn new(store: &Store, specs: &[TruncationSpec]) -> Self {
        let type_count = store.edge_types().count();
        let mut unnamed = Vec::new();
        let mut named = Vec::new();
        for spec in specs {
            match &spec.edge_type {
                None => unnamed.push(PlanStep {
                    applies: None,
                    order: spec.order.clone(),
                    limit: as_limit(spec.limit),
                }),
                Some(label) => {
                    // a label naming no type truncates nothing
                    let Some(t) = store.find_edge_type(label) else { continue };
                    let depth = store.ancestors(TypeRef::Edge(t)).len();
                    let applies = (0..type_count)
                        .map(|i| store.type_conforms(TypeRef::Edge(crate::store::EdgeTypeId(i)), label))
                        .collect();
                    named.push((
                        depth,
                        PlanStep {
                            applies: Some(applies),
                            order: spec.order.clone(),
                            limit: as_limit(spec.limit),
                        },
                    ));
                }
            }
        }
        named.sort_by_key(|(depth, _)| *depth);
        let unnamed_limit = unnamed.iter().map(|s| s.limit).min();
        let mut type_limits = vec![None; type_count];
        for (_, step) in &named {
            if let Some(applies) = &step.applies {
                for (t, &a) in applies.iter().enumerate() {
                    if a {
                        type_limits[t] = Some(type_limits[t].map_or(step.limit, |l: usize| l.min(step.limit)));
                    }
                }
            }
        }
        let steps = unnamed.into_iter().chain(named.into_iter().map(|(_, s)| s)).collect();
        TruncationPlan {
            steps,
            unnamed_limit,
            type_limits,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Upper bound on the candidates that may survive truncation of `candidates`.
    pub fn bound(&self, store: &Store, candidates: &[ElementId]) -> usize {
        let mut per_type: Vec<usize> = vec![0; self.type_limits.len()];
        for &e in candidates {
            if let Some(edge) = store.edge(e) {
                per_type[edge.edge_type.0] += 1;
            }
        }
        let named: usize = per_type
            .iter()
            .zip(&self.type_limits)
            .map(|(&n, limit)| limit.map_or(n, |l| n.min(l)))
            .sum();
        self.unnamed_limit.map_or(named, |u| u.min(named))
    }

    /// Orders and truncates `candidates` (ascending edge ids) in place.
    pub fn apply(
        &self,
        ctx: &EvalContext<'_>,
        scope: &dyn Scope,
        candidates: &mut Vec<ElementId>,
    ) -> Result<(), EvalError> {
        for step in &self.steps {
            match &step.applies {
                None => {
                    sort_edges(ctx, scope, &step.order, candidates)?;
                    candidates.truncate(step.limit);
                }
                Some(applies) => {
                    let conforms = |e: &ElementId| ctx.store.edge(*e).is_some_and(|edge| applies[edge.edge_type.0]);
                    let (mut subset, rest): (Vec<_>, Vec<_>) = candidates.iter().partition(|e| conforms(e));
                    if subset.is_empty() {
                        continue;
                    }
                    if step.order.is_empty() {
                        subset.sort_unstable();
                    } else {
                        sort_edges(ctx, scope, &step.order, &mut subset)?;
                    }
                    subset.truncate(step.limit);
                    subset.extend(rest);
                    *candidates = subset;
                }
            }
        }
        Ok(())
    }
}

/// Sorts edges by the order keys evaluated with each edge in scope; ties
/// (and an empty key list) fall back to ascending edge id.
fn sort_edges(
    ctx: &EvalContext<'_>,
    scope: &dyn Scope,
    order: &[OrderKey],
    edges: &mut [ElementId],
) -> Result<(), EvalError> {
    if order.is_empty() {
        edges.sort_unstable();
        return Ok(());
    }
    let mut keyed = Vec::with_capacity(edges.len());
    for &e in edges.iter() {
        let env = Env::with_ambient(scope, e);
        let keys = order
            .iter()
            .map(|k| eval(&k.expr, ctx, env))
            .collect::<Result<Vec<Value>, _>>()?;
        keyed.push((keys, e));
    }
    let families: Vec<Option<u8>> = (0..order.len())
        .map(|i| dominant_family(keyed.iter().map(|(k, _)| k[i].clone())))
        .collect();
    keyed.sort_by(|(ka, ea), (kb, eb)| {
        for (i, key) in order.iter().enumerate() {
            let ord = compare_sort_cells(&ka[i], &kb[i], families[i], key.direction == SortDirection::Desc);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        ea.cmp(eb)
    });
    for (slot, (_, e)) in edges.iter_mut().zip(keyed) {
        *slot = e;
    }
    Ok(())
}

/// Applies `specs` to one expansion's candidate edges. `candidates` are the
/// edges that passed the direction and label filters.
pub fn truncate_candidates(
    store: &Store,
    functions: &FunctionRegistry,
    specs: &[TruncationSpec],
    candidates: &[ElementId],
    scope: &dyn Scope,
) -> Result<Vec<ElementId>, EvalError> {
    let plan = TruncationPlan::new(store, specs);
    let mut out = candidates.to_vec();
    out.sort_unstable();
    plan.apply(&EvalContext::new(store, functions), scope, &mut out)?;
    Ok(out)
}
