//! Side-by-side evaluation of the free-fermion pipeline and exact
//! diagonalization on the same finite ring.

use brokensym_core::fermion_corr::{build_table, CorrelatorTable};
use brokensym_core::model::{ModelSpec, MomentumGrid};
use brokensym_core::quench::QuenchProtocol;
use brokensym_core::rdm::{enumerate_basis, DistanceEngine, SpinSubset, WickSettings};
use brokensym_core::wick::{symmetric_expectation, Orientation, PauliString};
use num_complex::Complex64;

use crate::ed::{
    build_hamiltonian, max_broken_state, oracle_distance, parity_ground_states, DenseState, EdResult, Parity, Spectrum,
};

/// Largest separation R used for the doubled strings W = O O_{+R}.
pub const MAX_ORACLE_R: usize = 4;
/// Width of the site window whose strings are compared.
pub const WINDOW_SITES: i64 = 3;

/// Every non-identity even string supported on sites 0..WINDOW_SITES, then
/// W = O O_{+R} for every odd string there and every admissible R <= MAX_ORACLE_R.
pub fn comparison_operators() -> Vec<PauliString> {
    let window = SpinSubset::new((0..WINDOW_SITES).collect()).expect("window is non-empty");
    let basis = enumerate_basis(&window, WINDOW_SITES as usize).expect("window fits l_max");
    let mut out: Vec<PauliString> = Vec::new();
    for b in &basis {
        if b.even && !b.op.is_identity() && !out.contains(&b.op) {
            out.push(b.op.clone());
        }
    }
    let mut odd: Vec<PauliString> = Vec::new();
    for b in &basis {
        let anchored = b.op.anchored();
        if !b.even && !odd.contains(&anchored) {
            odd.push(anchored);
        }
    }
    for op in &odd {
        for r in op.span() + 1..=MAX_ORACLE_R {
            let w = op.doubled(r).expect("r exceeds span");
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub t: f64,
    pub operator: PauliString,
    pub pipeline: Complex64,
    pub oracle: Complex64,
}

impl OracleRow {
    pub fn deviation(&self) -> f64 {
        (self.pipeline - self.oracle).norm()
    }
}

/// D_S from both sides at one time: pipeline (thermodynamic limit) and ED ring.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub t: f64,
    pub subset: String,
    pub pipeline: f64,
    pub oracle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub n_sites: usize,
    /// E_odd - E_even of the initial Hamiltonian on the ring.
    pub splitting: f64,
    pub rows: Vec<OracleRow>,
    /// Largest |f, g, h| mismatch between the ED and pipeline tables.
    pub table_deviation: f64,
    pub ed_tables: Vec<CorrelatorTable>,
    pub distances: Vec<DistanceRow>,
}

impl OracleReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(OracleRow::deviation).fold(self.table_deviation, f64::max)
    }

    pub fn worst(&self) -> Option<&OracleRow> {
        self.rows.iter().max_by(|a, b| a.deviation().total_cmp(&b.deviation()))
    }
}

fn table_gap(a: &CorrelatorTable, b: &CorrelatorTable) -> brokensym_core::Result<f64> {
    let rm = a.r_max().min(b.r_max()) as i64;
    let mut worst: f64 = 0.0;
    for r in -rm..=rm {
        worst = worst.max((a.f(r)? - b.f(r)?).norm()).max((a.g(r)? - b.g(r)?).abs()).max((a.h(r)? - b.h(r)?).norm());
    }
    Ok(worst)
}

/// Settings for the optional D_S envelope comparison.
#[derive(Debug, Clone)]
pub struct EnvelopeSettings {
    pub subsets: Vec<SpinSubset>,
    pub grid: MomentumGrid,
    pub wick: WickSettings,
}

/// Runs the comparison at each time in `times`.
///
/// Parity-even strings are compared on the even ground state of the initial
/// model, evolved under the final one, against the pipeline on the matching
/// antiperiodic grid. When `envelope` is given, D_S from the ring's maximally
/// broken superposition is reported next to the pipeline value; the two only
/// agree up to finite-size corrections.
pub fn compare(
    model_initial: &ModelSpec,
    model_final: &ModelSpec,
    n_sites: usize,
    times: &[f64],
    envelope: Option<&EnvelopeSettings>,
) -> EdResult<OracleReport> {
    let sectors: &[Parity] = if envelope.is_some() { &[Parity::Even, Parity::Odd] } else { &[Parity::Even] };
    let initial = Spectrum::for_sectors(&build_hamiltonian(model_initial, n_sites)?, &[Parity::Even, Parity::Odd])?;
    let ground = parity_ground_states(&initial)?;
    let evolution = Spectrum::for_sectors(&build_hamiltonian(model_final, n_sites)?, sectors)?;
    let protocol = QuenchProtocol::new(*model_initial, *model_final, MomentumGrid::Finite { n_sites })?;
    let ops = comparison_operators();
    let r_max = n_sites - 1;

    let broken: Option<(DenseState, DistanceEngine)> = match envelope {
        Some(env) => {
            let (state, _) = max_broken_state(&ground, Orientation::for_model(model_initial))?;
            let q = QuenchProtocol::new(*model_initial, *model_final, env.grid)?;
            let engine = DistanceEngine::new(q, &env.subsets, &[], env.wick, brokensym_core::rdm::DEFAULT_L_MAX)?;
            Some((state, engine))
        }
        None => None,
    };

    let mut rows = Vec::new();
    let mut ed_tables = Vec::new();
    let mut distances = Vec::new();
    let mut table_deviation: f64 = 0.0;
    for &t in times {
        let state = evolution.evolve(&ground.even, t)?;
        let pipeline_table = build_table(&protocol, t, r_max)?;
        let ed_table = state.correlator_table(t, r_max)?;
        table_deviation = table_deviation.max(table_gap(&pipeline_table, &ed_table)?);
        ed_tables.push(ed_table);
        for op in &ops {
            rows.push(OracleRow {
                t,
                operator: op.clone(),
                pipeline: symmetric_expectation(op, &pipeline_table)?,
                oracle: state.pauli_expectation(op)?,
            });
        }
        if let (Some((broken0, engine)), Some(env)) = (&broken, envelope) {
            let broken_t = evolution.evolve(broken0, t)?;
            let sample = engine.sample(t)?;
            for (s, d) in env.subsets.iter().zip(sample.distances) {
                distances.push(DistanceRow {
                    t,
                    subset: s.label(),
                    pipeline: d,
                    oracle: oracle_distance(&broken_t, &state, s.sites())?,
                });
            }
        }
    }
    Ok(OracleReport { n_sites, splitting: ground.gap, rows, table_deviation, ed_tables, distances })
}
