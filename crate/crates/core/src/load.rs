//! Assembling a program, its specifications and the Herbrand universe they
//! share from source texts.

use std::sync::Arc;

use thiserror::Error;

use crate::parser::{parse_program_lenient, parse_spec, ParseError, ProgramParseError};
use crate::spec::{SpecError, SpecSet};
use crate::term::{Program, Term};
use crate::universe::{Signature, Universe};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("program: {0}")]
    Program(#[from] ProgramParseError),
    #[error("specification: {0}")]
    SpecSyntax(ParseError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

pub struct Loaded {
    pub program: Program,
    pub parts: Vec<(String, Vec<usize>)>,
    pub universe: Arc<Universe>,
    pub specs: SpecSet,
}

/// The signature is that of the program and specifications, the `extras`
/// and the program's `signature/1` directive, plus `fresh` new constants.
pub fn load(program: &str, specs: &str, extras: &[Term], fresh: usize) -> Result<Loaded, LoadError> {
    let sp = parse_program_lenient(program)?;
    let src = parse_spec(specs).map_err(LoadError::SpecSyntax)?;
    let mut sig = Signature::new();
    sig.add_program(&sp.program);
    src.collect_symbols(&mut sig);
    sp.signature_extras.iter().chain(extras).for_each(|t| sig.add_term(t));
    sig.add_fresh_constants(fresh);
    let universe = Arc::new(Universe::new(sig));
    let specs = SpecSet::bind(&src, universe.clone())?;
    Ok(Loaded { program: sp.program, parts: sp.parts, universe, specs })
}
