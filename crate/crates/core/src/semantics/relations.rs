//! Transition relations of Event-B events and of their JML translations.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::eval::Evaluator;
use super::universe::{enumerate_states, machine_vars, SemanticsError, Universe};
use super::value::{Env, Relation, State, Value};
use crate::eventb::{ActionKind, EbType, Event, Ident, LabeledAction, Machine, Pred};
use crate::jml::{JmlClass, JmlMethodSpec, JmlPredicate, SpecCase};

type SResult<T> = Result<T, SemanticsError>;

/// How the stuttering branch of an event's relation is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stutter {
    /// `(a, a)` whenever no parameter valuation enables the event.
    Literal,
    /// As `Literal`, but only for states satisfying the invariant.
    WithInvariant,
}

/// What an event does in one pre-state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EbStep {
    /// No parameter valuation satisfies the guards.
    Stutter,
    /// Enabled; the invariant-respecting post-states (possibly none).
    Fire(BTreeSet<State>),
}

/// Event-B side of a machine over a finite universe.
pub struct EbModel<'a> {
    pub machine: &'a Machine,
    pub eval: Evaluator<'a>,
    pub vars: Vec<(Ident, EbType)>,
    domains: BTreeMap<Ident, BTreeSet<Value>>,
    pub invariant: Pred,
}

impl<'a> EbModel<'a> {
    pub fn new(machine: &'a Machine, u: &'a Universe) -> SResult<Self> {
        let vars = machine_vars(machine)?;
        let domains = vars
            .iter()
            .map(|(v, t)| Ok((v.clone(), u.domain(t)?.into_iter().collect())))
            .collect::<SResult<_>>()?;
        Ok(EbModel {
            machine,
            eval: Evaluator::new(u, &machine.carrier_sets),
            vars,
            domains,
            invariant: machine.invariant(),
        })
    }

    pub fn states(&self) -> SResult<Vec<State>> {
        enumerate_states(&self.vars, self.eval.universe)
    }

    /// Invariant truth; an evaluation error counts as false.
    pub fn inv_holds(&self, s: &State) -> bool {
        self.eval
            .eb_pred_holds(&self.invariant, s, &Env::new())
            .unwrap_or(false)
    }

    /// Whether every variable's value lies within the universe.
    pub fn in_universe(&self, s: &State) -> bool {
        self.domains
            .iter()
            .all(|(v, d)| s.get(v).is_some_and(|x| d.contains(x)))
    }

    /// All valuations of the parameters of `e`.
    pub fn param_valuations(&self, e: &Event) -> SResult<Vec<Env>> {
        let mut out = vec![Env::new()];
        for p in &e.params {
            let dom = self.eval.universe.domain(&p.ty)?;
            self.eval
                .universe
                .ensure_within("parameter valuations", (out.len() * dom.len()) as u128)?;
            out = out
                .iter()
                .flat_map(|env| {
                    dom.iter().map(move |v| {
                        let mut env = env.clone();
                        env.insert(p.name.clone(), v.clone());
                        env
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Parameter valuations under which every guard of `e` holds at `a`.
    /// A guard whose evaluation fails is unsatisfied.
    pub fn enabling(&self, e: &Event, a: &State) -> SResult<Vec<Env>> {
        Ok(self
            .param_valuations(e)?
            .into_iter()
            .filter(|env| {
                e.guards
                    .iter()
                    .all(|g| self.eval.eb_pred_holds(&g.item, a, env).unwrap_or(false))
            })
            .collect())
    }

    /// Post-states of the simultaneous `actions` from `a` under `env`,
    /// restricted to the universe and the invariant.
    pub fn action_posts(
        &self,
        actions: &[LabeledAction],
        a: &State,
        env: &Env,
    ) -> SResult<BTreeSet<State>> {
        let mut choices: Vec<(Ident, Vec<Value>)> = Vec::new();
        for act in actions {
            let act = &act.item;
            let values = match &act.kind {
                ActionKind::Assign(e) => self.eval.eval_expr(e, a, env).into_iter().collect(),
                ActionKind::Becomes(p) => {
                    let ty = self
                        .vars
                        .iter()
                        .find(|(v, _)| *v == act.target)
                        .map(|(_, t)| t)
                        .ok_or_else(|| SemanticsError::UntypedVariable(act.target.clone()))?;
                    let primed = act.target.prime();
                    let mut env = env.clone();
                    self.eval
                        .universe
                        .domain(ty)?
                        .into_iter()
                        .filter(|d| {
                            env.insert(primed.clone(), d.clone());
                            self.eval.eb_pred_holds(p, a, &env).unwrap_or(false)
                        })
                        .collect()
                }
            };
            choices.push((act.target.clone(), values));
        }
        let mut posts = vec![a.clone()];
        for (v, values) in &choices {
            posts = posts
                .iter()
                .flat_map(|b| {
                    values.iter().map(move |x| {
                        let mut b = b.clone();
                        b.insert(v.clone(), x.clone());
                        b
                    })
                })
                .collect();
        }
        Ok(posts
            .into_iter()
            .filter(|b| self.in_universe(b) && self.inv_holds(b))
            .collect())
    }

    /// The behaviour of `e` at `a`.
    pub fn step(&self, e: &Event, a: &State) -> SResult<EbStep> {
        let enabling = self.enabling(e, a)?;
        if enabling.is_empty() {
            return Ok(EbStep::Stutter);
        }
        let mut posts = BTreeSet::new();
        if self.inv_holds(a) {
            for env in &enabling {
                posts.extend(self.action_posts(&e.actions, a, env)?);
            }
        }
        Ok(EbStep::Fire(posts))
    }

    /// Membership of `(a, b)` in the event's relation.
    pub fn allows(&self, e: &Event, a: &State, b: &State, stutter: Stutter) -> SResult<bool> {
        Ok(match self.step(e, a)? {
            EbStep::Stutter => {
                a == b && (stutter == Stutter::Literal || self.inv_holds(a))
            }
            EbStep::Fire(posts) => posts.contains(b),
        })
    }

    pub fn event_rel(&self, e: &Event, stutter: Stutter) -> SResult<Relation> {
        let states = self.states()?;
        let parts: Vec<SResult<Vec<(State, State)>>> = states
            .par_iter()
            .map(|a| {
                Ok(match self.step(e, a)? {
                    EbStep::Stutter => {
                        if stutter == Stutter::Literal || self.inv_holds(a) {
                            vec![(a.clone(), a.clone())]
                        } else {
                            vec![]
                        }
                    }
                    EbStep::Fire(posts) => posts.into_iter().map(|b| (a.clone(), b)).collect(),
                })
            })
            .collect();
        let mut rel = Relation::new();
        for p in parts {
            rel.extend(p?);
        }
        Ok(rel)
    }

    pub fn assg_rel(&self, actions: &[LabeledAction]) -> SResult<Relation> {
        let mut rel = Relation::new();
        for a in self.states()? {
            if self.inv_holds(&a) {
                for b in self.action_posts(actions, &a, &Env::new())? {
                    rel.insert((a.clone(), b));
                }
            }
        }
        Ok(rel)
    }

    /// States reachable by the initialisation, which reads no pre-state.
    pub fn init_states(&self) -> SResult<BTreeSet<State>> {
        self.action_posts(&self.machine.initialisation, &State::new(), &Env::new())
    }
}

/// JML side of a translated class, over the same state space.
pub struct JmlModel<'a> {
    pub class: &'a JmlClass,
    pub eval: Evaluator<'a>,
    pub vars: Vec<Ident>,
    guards: BTreeMap<String, JmlPredicate>,
}

impl<'a> JmlModel<'a> {
    pub fn new(class: &'a JmlClass, vars: Vec<Ident>, u: &'a Universe) -> Self {
        let guards = class
            .methods
            .iter()
            .filter_map(|m| m.guard_predicate().map(|p| (m.name.clone(), p.clone())))
            .collect();
        JmlModel {
            class,
            eval: Evaluator::new(u, &class.carrier_sets),
            vars,
            guards,
        }
    }

    fn holds(&self, p: &JmlPredicate, pre: &State, post: &State) -> bool {
        self.eval
            .jml_pred_holds(p, pre, post, &mut Env::new(), &self.guards)
            .unwrap_or(false)
    }

    pub fn inv_holds(&self, s: &State) -> bool {
        self.holds(&self.class.class_invariant, s, s)
    }

    pub fn initially_holds(&self, s: &State) -> bool {
        self.holds(&self.class.initially, s, s) && self.inv_holds(s)
    }

    /// Truth of the guard query `name` at `a`.
    pub fn guard_holds(&self, name: &str, a: &State) -> SResult<bool> {
        let g = self
            .guards
            .get(name)
            .ok_or_else(|| SemanticsError::MissingGuard(name.to_string()))?;
        Ok(self.holds(g, a, a))
    }

    pub fn requires(&self, c: &SpecCase, a: &State) -> bool {
        self.holds(&c.requires, a, a)
    }

    /// Whether `a` and `b` agree outside the assignable clause.
    pub fn frame(&self, c: &SpecCase, a: &State, b: &State) -> bool {
        self.vars
            .iter()
            .all(|v| c.assignable.allows(v) || a.get(v) == b.get(v))
    }

    fn cases(m: &JmlMethodSpec) -> impl Iterator<Item = &SpecCase> {
        std::iter::once(&m.normal).chain(m.exceptional.iter())
    }

    /// `requires(a) => (ensures(a, b) && frame(a, b))` for both cases;
    /// the invariant conjuncts are the caller's business.
    pub fn method_allows(&self, m: &JmlMethodSpec, a: &State, b: &State) -> bool {
        JmlModel::cases(m).all(|c| {
            !self.requires(c, a) || (self.frame(c, a, b) && self.holds(&c.ensures, a, b))
        })
    }

    /// Pairs of indices into `inv_states` (all satisfying the invariant)
    /// related by run method `m`.
    pub fn method_pairs(&self, m: &JmlMethodSpec, inv_states: &[State]) -> Vec<(usize, usize)> {
        let per_pre: Vec<Vec<(usize, usize)>> = inv_states
            .par_iter()
            .enumerate()
            .map(|(i, a)| {
                let active: Vec<&SpecCase> =
                    JmlModel::cases(m).filter(|c| self.requires(c, a)).collect();
                inv_states
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| active.iter().all(|c| self.frame(c, a, b)))
                    .filter(|(_, b)| active.iter().all(|c| self.holds(&c.ensures, a, b)))
                    .map(|(j, _)| (i, j))
                    .collect()
            })
            .collect();
        per_pre.into_iter().flatten().collect()
    }
}

fn var_names(m: &Machine) -> Vec<Ident> {
    m.variables.iter().map(|v| v.name.clone()).collect()
}

/// Invariant states on the JML side.
pub fn jml_invariant_states(
    m: &Machine,
    class: &JmlClass,
    u: &Universe,
) -> SResult<Vec<State>> {
    let jm = JmlModel::new(class, var_names(m), u);
    let states = enumerate_states(&machine_vars(m)?, u)?;
    Ok(states.into_par_iter().filter(|s| jm.inv_holds(s)).collect())
}

/// Relation of event `e` of `m`, with the stuttering branch read literally.
pub fn eb_event_rel(m: &Machine, e: &Event, u: &Universe) -> SResult<Relation> {
    EbModel::new(m, u)?.event_rel(e, Stutter::Literal)
}

/// Relation of a guard-free, parameter-free substitution.
pub fn eb_assg_rel(m: &Machine, actions: &[LabeledAction], u: &Universe) -> SResult<Relation> {
    EbModel::new(m, u)?.assg_rel(actions)
}

pub fn eb_init_states(m: &Machine, u: &Universe) -> SResult<BTreeSet<State>> {
    EbModel::new(m, u)?.init_states()
}

/// Relation of run method `run` of `class`, over pairs of invariant states.
pub fn jml_method_rel(
    m: &Machine,
    class: &JmlClass,
    run: &str,
    u: &Universe,
) -> SResult<Relation> {
    let method = class
        .method(run)
        .ok_or_else(|| SemanticsError::MissingGuard(run.to_string()))?;
    let inv_states = jml_invariant_states(m, class, u)?;
    u.ensure_within("state pairs", (inv_states.len() as u128).pow(2))?;
    let jm = JmlModel::new(class, var_names(m), u);
    Ok(jm
        .method_pairs(method, &inv_states)
        .into_iter()
        .map(|(i, j)| (inv_states[i].clone(), inv_states[j].clone()))
        .collect())
}

pub fn jml_initially_states(
    m: &Machine,
    class: &JmlClass,
    u: &Universe,
) -> SResult<BTreeSet<State>> {
    let jm = JmlModel::new(class, var_names(m), u);
    Ok(enumerate_states(&machine_vars(m)?, u)?
        .into_par_iter()
        .filter(|s| jm.initially_holds(s))
        .collect::<Vec<_>>()
        .into_iter()
        .collect())
}
