//! Group gradings on matrix algebras and twisted group algebras.
//!
//! The crate builds universal grading groups from support data, decides
//! weak equivalence of elementary gradings and of gradings of the form
//! `M(γ, σ)`, enumerates coarsenings, and searches for regradings by finite
//! groups with verifiable certificates.
//!
//! Modules, bottom up:
//! - [`words`]: free-group words, presentations, Smith normal form
//! - [`fingrp`]: finite groups as multiplication tables, homomorphism search
//! - [`grading`]: elementary gradings, support tables, coarsenings
//! - [`algebra`]: structure-constant algebras with a degree map
//! - [`coset`]: Todd–Coxeter coset enumeration
//! - [`universal`]: universal group presentations and the grading built from
//!   a presentation
//! - [`regrade`]: regrading certificates and searches
//! - [`twisted`]: bicharacters, cocycles, twisted group algebras, `M(γ, σ)`

pub mod algebra;
pub mod coset;
pub mod fingrp;
pub mod grading;
pub mod regrade;
pub mod twisted;
pub mod universal;
pub mod words;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Word(#[from] words::WordError),
    #[error(transparent)]
    Group(#[from] fingrp::GroupError),
    #[error(transparent)]
    Grading(#[from] grading::GradingError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Regrade(#[from] regrade::RegradeError),
    #[error(transparent)]
    Twisted(#[from] twisted::TwistedError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
