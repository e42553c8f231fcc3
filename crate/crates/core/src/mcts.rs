//! Gumbel-style Monte Carlo tree search.
//!
//! Root action selection samples Gumbel noise, keeps the top-m actions by
//! `g + logits`, and allocates the simulation budget by sequential halving;
//! interior nodes follow the deterministic visit-matching rule over the
//! improved policy. The search is generic over [`Game`] so toy games can be
//! plugged in for verification, and it runs as a resumable driver so many
//! searches can share batched network evaluations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel};
use serde::Serialize;
use thiserror::Error;

/// Abstract two-player zero-sum game with deterministic transitions and
/// strict side alternation.
pub trait Game {
    type State: Clone;

    fn action_count(&self) -> usize;

    /// Legal-action mask for a non-terminal state; at least one bit set.
    fn legal_mask(&self, state: &Self::State) -> Vec<bool>;

    fn apply(&self, state: &Self::State, action: usize) -> Self::State;

    /// Terminal value in [-1, 1] from the perspective of the side to move,
    /// or `None` while the game is live.
    fn terminal_value(&self, state: &Self::State) -> Option<f32>;
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub simulations: u32,
    /// Maximum root actions considered by the Gumbel top-m selection.
    pub max_considered_actions: usize,
    pub c_visit: f32,
    pub c_scale: f32,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            simulations: 128,
            max_considered_actions: 16,
            c_visit: 50.0,
            c_scale: 1.0,
            rng_seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.simulations < 2 {
            return Err(SearchError::InvalidConfig("simulations must be >= 2"));
        }
        if self.max_considered_actions < 2 {
            return Err(SearchError::InvalidConfig(
                "max_considered_actions must be >= 2",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search started from a terminal state")]
    TerminalRoot,
    #[error("evaluator returned a non-finite value")]
    NonFiniteEvaluation,
    #[error("state has no legal action but is not terminal")]
    NoLegalActions,
    #[error("invalid search config: {0}")]
    InvalidConfig(&'static str),
    #[error("provide() called without a pending evaluation")]
    NothingPending,
}

/// sigma(q) = (c_visit + max_visit) * c_scale * q for q normalized to [0,1];
/// monotone in q, so adding it to logits preserves their ordering per level.
pub fn sigma(q: f32, max_visit: u32, cfg: &SearchConfig) -> f32 {
    (cfg.c_visit + max_visit as f32) * cfg.c_scale * q
}

/// Completed Q-values over a node's legal actions: visited actions get their
/// empirical mean min-max normalized over {v_hat, visited q}, unvisited ones
/// the normalized mixed value. Returns the completed vector (all in [0,1])
/// and the raw mixed value.
pub fn completed_q(
    priors: &[f32],
    visits: &[u32],
    totals: &[f32],
    value_hat: f32,
) -> (Vec<f32>, f32) {
    let sum_n: f32 = visits.iter().map(|&n| n as f32).sum();
    let v_mix = if sum_n == 0.0 {
        value_hat
    } else {
        let mut prior_visited = 0.0f32;
        let mut weighted_q = 0.0f32;
        for i in 0..visits.len() {
            if visits[i] > 0 {
                prior_visited += priors[i];
                weighted_q += priors[i] * totals[i] / visits[i] as f32;
            }
        }
        (value_hat + (sum_n / prior_visited) * weighted_q) / (1.0 + sum_n)
    };

    let mut lo = value_hat;
    let mut hi = value_hat;
    for i in 0..visits.len() {
        if visits[i] > 0 {
            let q = totals[i] / visits[i] as f32;
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    let norm = |x: f32| -> f32 {
        if hi - lo > f32::EPSILON {
            (x - lo) / (hi - lo)
        } else {
            0.5
        }
    };
    let completed = (0..visits.len())
        .map(|i| {
            if visits[i] > 0 {
                norm(totals[i] / visits[i] as f32)
            } else {
                norm(v_mix)
            }
        })
        .collect();
    (completed, v_mix)
}

/// Improved policy over a node's legal actions:
/// softmax(logits + sigma(completedQ)).
pub fn improved_policy(
    logits: &[f32],
    priors: &[f32],
    visits: &[u32],
    totals: &[f32],
    value_hat: f32,
    cfg: &SearchConfig,
) -> Vec<f32> {
    let (completed, _) = completed_q(priors, visits, totals, value_hat);
    let max_visit = visits.iter().copied().max().unwrap_or(0);
    let scored: Vec<f32> = logits
        .iter()
        .zip(&completed)
        .map(|(&l, &q)| l + sigma(q, max_visit, cfg))
        .collect();
    softmax(&scored)
}

/// Deterministic interior action pick: argmax of
/// `policy(a) - visits(a) / (1 + total_visits)`, ties to the lowest index.
pub fn interior_pick(policy: &[f32], visits: &[u32]) -> usize {
    let total: u32 = visits.iter().sum();
    let denom = 1.0 + total as f32;
    let mut best = 0usize;
    let mut best_score = f32::NEG_INFINITY;
    for i in 0..policy.len() {
        let score = policy[i] - visits[i] as f32 / denom;
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}

fn softmax(scores: &[f32]) -> Vec<f32> {
    let max = scores.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let exps: Vec<f32> = scores.iter().map(|&s| (s - max).exp()).collect();
    let total: f32 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Search output: the chosen action, the improved policy target over the
/// full action space, the root mixed-value estimate, and per-action root
/// statistics for diagnostics.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub chosen_action: usize,
    pub policy: Vec<f32>,
    pub root_value: f32,
    pub root_entropy: f32,
    pub root_debug: RootDebug,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootDebug {
    pub simulations: u32,
    pub value_hat: f32,
    pub mixed_value: f32,
    pub actions: Vec<RootActionStat>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootActionStat {
    pub action: usize,
    pub prior: f32,
    pub gumbel: f32,
    pub visits: u32,
    pub mean_value: Option<f32>,
    pub improved_policy: f32,
}

struct Node<S> {
    state: S,
    expanded: bool,
    terminal_value: Option<f32>,
    /// Legal actions ascending; the stat vectors below are parallel to it.
    actions: Vec<u32>,
    logits: Vec<f32>,
    priors: Vec<f32>,
    value_hat: f32,
    visits: Vec<u32>,
    totals: Vec<f32>,
    children: Vec<Option<usize>>,
}

impl<S> Node<S> {
    fn unexpanded(state: S, terminal_value: Option<f32>) -> Node<S> {
        Node {
            state,
            expanded: false,
            terminal_value,
            actions: Vec::new(),
            logits: Vec::new(),
            priors: Vec::new(),
            value_hat: 0.0,
            visits: Vec::new(),
            totals: Vec::new(),
            children: Vec::new(),
        }
    }
}

/// One phase of the sequential-halving plan: `rounds` equal visits for each
/// surviving action, plus `extras` single visits for the top-ranked
/// survivors in the final phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PhasePlan {
    survivors: usize,
    rounds: u32,
    extras: u32,
}

/// Split `budget` simulations over ceil(log2(m)) halving phases. Non-final
/// phases get floor(budget/phases) simulations, rounded down to equal
/// per-survivor rounds; every leftover is spent in the final phase.
fn plan_phases(m: usize, budget: u32) -> Vec<PhasePlan> {
    assert!(m >= 1);
    if m == 1 {
        return vec![PhasePlan {
            survivors: 1,
            rounds: budget,
            extras: 0,
        }];
    }
    let phases = (usize::BITS - (m - 1).leading_zeros()) as usize; // ceil(log2 m)
    let mut counts = Vec::with_capacity(phases);
    let mut s = m;
    for _ in 0..phases {
        counts.push(s);
        s = s.div_ceil(2);
    }
    let per_phase = budget / phases as u32;
    let mut plan = Vec::with_capacity(phases);
    let mut spent = 0u32;
    for (i, &s) in counts.iter().enumerate() {
        if i + 1 < phases {
            let rounds = per_phase / s as u32;
            spent += rounds * s as u32;
            plan.push(PhasePlan {
                survivors: s,
                rounds,
                extras: 0,
            });
        } else {
            let remaining = budget - spent;
            plan.push(PhasePlan {
                survivors: s,
                rounds: remaining / s as u32,
                extras: remaining % s as u32,
            });
        }
    }
    plan
}

enum Stage {
    RootEval,
    /// Cursor into the halving plan: the next simulation to run.
    Sim {
        phase: usize,
        round: u32,
        slot: usize,
        in_extras: bool,
    },
    Done,
}

struct Pending {
    path: Vec<(usize, usize)>,
    leaf: usize,
}

/// Resumable Gumbel search over one root. `advance()` runs simulations until
/// a network evaluation is needed (or the budget is spent); callers feed the
/// evaluation back with `provide()` and extract the result with `finish()`.
pub struct SearchDriver<G: Game> {
    game: G,
    cfg: SearchConfig,
    arena: Vec<Node<G::State>>,
    gumbel: Vec<f32>,
    survivors: Vec<usize>,
    plan: Vec<PhasePlan>,
    stage: Stage,
    pending: Option<Pending>,
    simulations_run: u32,
}

const ROOT: usize = 0;

impl<G: Game> SearchDriver<G> {
    pub fn new(game: G, root_state: G::State, cfg: SearchConfig) -> Result<Self, SearchError> {
        cfg.validate()?;
        if game.terminal_value(&root_state).is_some() {
            return Err(SearchError::TerminalRoot);
        }
        let root = Node::unexpanded(root_state, None);
        Ok(SearchDriver {
            game,
            cfg,
            arena: vec![root],
            gumbel: Vec::new(),
            survivors: Vec::new(),
            plan: Vec::new(),
            stage: Stage::RootEval,
            pending: None,
            simulations_run: 0,
        })
    }

    /// Run until an evaluation is required (returns true; see
    /// [`SearchDriver::pending_state`]) or the search completes (false).
    pub fn advance(&mut self) -> bool {
        if self.pending.is_some() {
            return true;
        }
        loop {
            match self.stage {
                Stage::RootEval => {
                    self.pending = Some(Pending {
                        path: Vec::new(),
                        leaf: ROOT,
                    });
                    return true;
                }
                Stage::Done => return false,
                Stage::Sim { slot, .. } => {
                    let action_idx = self.survivors[slot];
                    if self.simulate(action_idx) {
                        // Terminal leaf: backup already done, move on.
                        self.cursor_after_simulation();
                        continue;
                    }
                    return true;
                }
            }
        }
    }

    /// The state awaiting evaluation; valid after `advance()` returned true.
    pub fn pending_state(&self) -> &G::State {
        let pending = self.pending.as_ref().expect("no pending evaluation");
        &self.arena[pending.leaf].state
    }

    /// Feed the evaluator output (full-action-space logits and a value from
    /// the pending state's mover perspective) back into the search.
    pub fn provide(&mut self, logits: &[f32], value: f32) -> Result<(), SearchError> {
        let pending = self.pending.take().ok_or(SearchError::NothingPending)?;
        if !value.is_finite() {
            return Err(SearchError::NonFiniteEvaluation);
        }
        self.expand(pending.leaf, logits, value)?;
        if pending.leaf == ROOT {
            self.setup_root()
        } else {
            self.backup(&pending.path, value);
            self.cursor_after_simulation();
            Ok(())
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self.stage, Stage::Done) && self.pending.is_none()
    }

    /// Total simulations completed so far (each backs up exactly one leaf).
    pub fn simulations_run(&self) -> u32 {
        self.simulations_run
    }

    fn expand(&mut self, id: usize, logits: &[f32], value: f32) -> Result<(), SearchError> {
        if logits.len() != self.game.action_count() {
            return Err(SearchError::NonFiniteEvaluation);
        }
        let mask = self.game.legal_mask(&self.arena[id].state);
        let mut actions = Vec::new();
        let mut node_logits = Vec::new();
        for (a, &legal) in mask.iter().enumerate() {
            if legal {
                let l = logits[a];
                if !l.is_finite() {
                    return Err(SearchError::NonFiniteEvaluation);
                }
                actions.push(a as u32);
                node_logits.push(l);
            }
        }
        if actions.is_empty() {
            return Err(SearchError::NoLegalActions);
        }
        let priors = softmax(&node_logits);
        let n = actions.len();
        let node = &mut self.arena[id];
        node.actions = actions;
        node.logits = node_logits;
        node.priors = priors;
        node.value_hat = value;
        node.visits = vec![0; n];
        node.totals = vec![0.0; n];
        node.children = vec![None; n];
        node.expanded = true;
        Ok(())
    }

    fn setup_root(&mut self) -> Result<(), SearchError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
        let gumbel_dist = Gumbel::new(0.0f64, 1.0f64).expect("valid Gumbel");
        self.gumbel = self.arena[ROOT]
            .actions
            .iter()
            .map(|_| gumbel_dist.sample(&mut rng) as f32)
            .collect();

        // Top-m by g + logits, ties to the lower action index.
        let mut order: Vec<usize> = (0..self.arena[ROOT].actions.len()).collect();
        let gumbel = &self.gumbel;
        let logits = &self.arena[ROOT].logits;
        order.sort_by(|&a, &b| {
            let sa = gumbel[a] + logits[a];
            let sb = gumbel[b] + logits[b];
            sb.partial_cmp(&sa).unwrap().then(a.cmp(&b))
        });
        let m = self.cfg.max_considered_actions.min(order.len());
        self.survivors = order[..m].to_vec();
        self.plan = plan_phases(m, self.cfg.simulations);
        self.stage = self.cursor_for_phase(0);
        Ok(())
    }

    /// Position the cursor on the first simulation of `phase`, skipping
    /// empty phases (tiny budgets), or finish the search.
    fn cursor_for_phase(&mut self, mut phase: usize) -> Stage {
        while phase < self.plan.len() {
            let plan = self.plan[phase];
            if plan.rounds > 0 {
                return Stage::Sim {
                    phase,
                    round: 0,
                    slot: 0,
                    in_extras: false,
                };
            }
            if plan.extras > 0 {
                self.survivors = self.ranked_survivors();
                return Stage::Sim {
                    phase,
                    round: 0,
                    slot: 0,
                    in_extras: true,
                };
            }
            phase = self.close_phase(phase);
        }
        Stage::Done
    }

    /// Rank survivors by the current root score and keep the top half
    /// (rounding up). Returns the next phase index.
    fn close_phase(&mut self, phase: usize) -> usize {
        if phase + 1 < self.plan.len() {
            let keep = self.plan[phase + 1].survivors;
            let order = self.ranked_survivors();
            self.survivors = order[..keep].to_vec();
        }
        phase + 1
    }

    /// Survivors sorted by g + logits + sigma(completedQ), best first.
    fn ranked_survivors(&self) -> Vec<usize> {
        let root = &self.arena[ROOT];
        let (completed, _) =
            completed_q(&root.priors, &root.visits, &root.totals, root.value_hat);
        let max_visit = root.visits.iter().copied().max().unwrap_or(0);
        let mut order = self.survivors.clone();
        order.sort_by(|&a, &b| {
            let sa = self.gumbel[a] + root.logits[a] + sigma(completed[a], max_visit, &self.cfg);
            let sb = self.gumbel[b] + root.logits[b] + sigma(completed[b], max_visit, &self.cfg);
            sb.partial_cmp(&sa).unwrap().then(a.cmp(&b))
        });
        order
    }

    /// Advance the cursor past the simulation that just completed.
    fn cursor_after_simulation(&mut self) {
        self.simulations_run += 1;
        let Stage::Sim {
            phase,
            round,
            slot,
            in_extras,
        } = self.stage
        else {
            return;
        };
        let plan = self.plan[phase];
        if in_extras {
            if slot + 1 < plan.extras as usize {
                self.stage = Stage::Sim {
                    phase,
                    round,
                    slot: slot + 1,
                    in_extras: true,
                };
            } else {
                let next = self.close_phase(phase);
                self.stage = self.cursor_for_phase(next);
            }
            return;
        }
        if slot + 1 < self.survivors.len() {
            self.stage = Stage::Sim {
                phase,
                round,
                slot: slot + 1,
                in_extras: false,
            };
        } else if round + 1 < plan.rounds {
            self.stage = Stage::Sim {
                phase,
                round: round + 1,
                slot: 0,
                in_extras: false,
            };
        } else if plan.extras > 0 {
            self.survivors = self.ranked_survivors();
            self.stage = Stage::Sim {
                phase,
                round: 0,
                slot: 0,
                in_extras: true,
            };
        } else {
            let next = self.close_phase(phase);
            self.stage = self.cursor_for_phase(next);
        }
    }

    /// Run one simulation through root action index `root_action`. Returns
    /// true when the simulation completed synchronously (terminal leaf) and
    /// false when it paused for an evaluation.
    fn simulate(&mut self, root_action: usize) -> bool {
        let mut path = vec![(ROOT, root_action)];
        let mut node_id = ROOT;
        let mut action_idx = root_action;
        loop {
            let child_id = match self.arena[node_id].children[action_idx] {
                Some(id) => id,
                None => {
                    let action = self.arena[node_id].actions[action_idx] as usize;
                    let state = self.game.apply(&self.arena[node_id].state, action);
                    let terminal = self.game.terminal_value(&state);
                    let id = self.arena.len();
                    self.arena.push(Node::unexpanded(state, terminal));
                    self.arena[node_id].children[action_idx] = Some(id);
                    id
                }
            };
            if let Some(value) = self.arena[child_id].terminal_value {
                self.backup(&path, value);
                return true;
            }
            if !self.arena[child_id].expanded {
                self.pending = Some(Pending {
                    path,
                    leaf: child_id,
                });
                return false;
            }
            // Interior descent by the deterministic visit-matching rule.
            let node = &self.arena[child_id];
            let policy = improved_policy(
                &node.logits,
                &node.priors,
                &node.visits,
                &node.totals,
                node.value_hat,
                &self.cfg,
            );
            let next_idx = interior_pick(&policy, &node.visits);
            path.push((child_id, next_idx));
            node_id = child_id;
            action_idx = next_idx;
        }
    }

    /// Walk leaf -> root, flipping the sign at each ply: `leaf_value` is
    /// from the leaf mover's perspective, and each edge stores value from
    /// its own node's mover perspective.
    fn backup(&mut self, path: &[(usize, usize)], leaf_value: f32) {
        let mut value = leaf_value;
        for &(node_id, action_idx) in path.iter().rev() {
            value = -value;
            let node = &mut self.arena[node_id];
            node.visits[action_idx] += 1;
            node.totals[action_idx] += value;
        }
    }

    /// Extract the result; only valid once `advance()` has returned false.
    pub fn finish(self) -> SearchResult {
        assert!(self.is_done(), "search is not finished");
        let root = &self.arena[ROOT];
        let policy_legal = improved_policy(
            &root.logits,
            &root.priors,
            &root.visits,
            &root.totals,
            root.value_hat,
            &self.cfg,
        );
        let (_, mixed_value) =
            completed_q(&root.priors, &root.visits, &root.totals, root.value_hat);
        let mut policy = vec![0.0f32; self.game.action_count()];
        for (i, &action) in root.actions.iter().enumerate() {
            policy[action as usize] = policy_legal[i];
        }
        let entropy = -policy_legal
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f32>();
        let chosen_idx = *self
            .ranked_survivors()
            .first()
            .expect("survivors never empty");
        let chosen_action = root.actions[chosen_idx] as usize;
        let actions = root
            .actions
            .iter()
            .enumerate()
            .map(|(i, &action)| RootActionStat {
                action: action as usize,
                prior: root.priors[i],
                gumbel: self.gumbel[i],
                visits: root.visits[i],
                mean_value: (root.visits[i] > 0).then(|| root.totals[i] / root.visits[i] as f32),
                improved_policy: policy_legal[i],
            })
            .collect();
        SearchResult {
            chosen_action,
            policy,
            root_value: mixed_value,
            root_entropy: entropy,
            root_debug: RootDebug {
                simulations: self.simulations_run,
                value_hat: root.value_hat,
                mixed_value,
                actions,
            },
        }
    }
}

/// Synchronous search: drives the evaluator inline until the budget is
/// spent. `evaluate` returns full-action-space logits and a value from the
/// given state's mover perspective.
pub fn run_search<G: Game>(
    game: G,
    root_state: G::State,
    mut evaluate: impl FnMut(&G::State) -> (Vec<f32>, f32),
    cfg: SearchConfig,
) -> Result<SearchResult, SearchError> {
    let mut driver = SearchDriver::new(game, root_state, cfg)?;
    while driver.advance() {
        let (logits, value) = evaluate(driver.pending_state());
        driver.provide(&logits, value)?;
    }
    Ok(driver.finish())
}
