//! Desk-scale self-play reinforcement learning for Tablut.
//!
//! The crate is organized around the training pipeline:
//!
//! - [`rules`]: bitboard rules engine for the 9x9 game.
//! - [`encoding`]: state planes, the 2592-way action space, and the C4
//!   rotation augmentation group.
//! - [`net`]: dual-head residual network with explicit forward/backward
//!   passes, AdamW, and the checkpoint archive format.
//! - [`mcts`]: Gumbel-style Monte Carlo tree search over an abstract game
//!   interface.
//! - [`selfplay`]: batched self-play, the FIFO replay buffer, and the
//!   past-checkpoint opponent pool.
//! - [`rating`]: Bayesian Elo maximum-likelihood rating with draw and
//!   first-mover-advantage parameters, plus the evaluation schedule.
//! - [`orchestrator`]: run configuration, the train/eval loop, match
//!   running, and metrics export used by the CLI.

pub mod encoding;
pub mod mcts;
pub mod net;
pub mod orchestrator;
pub mod rating;
pub mod rules;
pub mod selfplay;

pub use encoding::{ActionIndex, ActionMask, HistoryWindow, PlaneStack, ACTION_SPACE, NUM_PLANES};
pub use rules::{Board, GameState, Move, Outcome, OutcomeReason, OutcomeValue, Side, Square};
