#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use lpcomplete::level::LevelMapping;
use lpcomplete::load::{load, Loaded};
use lpcomplete::parser::{parse_atom, parse_callsucc, parse_level_mapping, parse_query};
use lpcomplete::spec::callsucc::CallSuccessSpec;
use lpcomplete::spec::Spec;
use lpcomplete::term::Atom;
use lpcomplete::verify::{Bounds, Ctx};

pub fn corpus(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub struct Example {
    pub loaded: Loaded,
    pub ctx: Ctx,
}

impl Example {
    pub fn new(program: &str, spec: &str, fresh: usize, depth: usize) -> Example {
        let loaded = load(&corpus(program), &corpus(spec), &[], fresh).expect("corpus loads");
        let ctx = Ctx::new(loaded.universe.clone(), Bounds { depth, ..Bounds::default() });
        Example { loaded, ctx }
    }

    pub fn spec(&self, name: &str) -> Spec {
        self.loaded.specs.get(name).expect("named spec").clone()
    }
}

pub fn mapping(rel: &str) -> LevelMapping {
    parse_level_mapping(&corpus(rel)).expect("mapping parses")
}

pub fn callsucc(rel: &str) -> CallSuccessSpec {
    parse_callsucc(&corpus(rel)).expect("call-success spec parses")
}

pub fn atom(s: &str) -> Atom {
    parse_atom(s).expect("atom parses")
}

pub fn query(s: &str) -> Vec<Atom> {
    parse_query(s).expect("query parses")
}
