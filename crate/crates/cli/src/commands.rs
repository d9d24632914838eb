use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use qwalk::community::{detect, signed_modularity, Measure, Partition, Phases};
use qwalk::fixtures::{graph_by_name, hamiltonian_by_name};
use qwalk::generators::{
    adjacency_hamiltonian, perturb_phases, planted_probabilities, randomize_weights, replicate_seed, GenSpec,
    PhasePerturbSpec,
};
use qwalk::graph::{graph_to_json, load_graph, GraphFormat, LabeledGraph};
use qwalk::metrics::{fit_sweep, nmi, quantumness_sweep, to_csv, Estimator, FitResult, Model, SweepRow};
use qwalk::spectral::load_hamiltonian;
use qwalk::walk::{
    avg_density, quantum_generator, quantumness_uniform_degree_form, walk_report, walk_report_for_hamiltonian,
    DensityMatrix, Horizon, InitialState, WalkReport,
};
use qwalk::{Graph, Hamiltonian, SpectralDecomposition};

use crate::output::{Outputs, RunManifest};
use crate::{
    CommunitiesArgs, EstimatorArg, GenArgs, Input, ModelArg, NmiArgs, PerturbArgs, QuantumnessArgs, RandomizeArgs,
    SweepArgs, WalkArgs,
};

enum Loaded {
    Graph(Graph),
    Hamiltonian(Hamiltonian),
}

impl Loaded {
    fn graph(self) -> Result<Graph> {
        match self {
            Loaded::Graph(g) => Ok(g),
            Loaded::Hamiltonian(_) => bail!("this command needs a graph, not a Hamiltonian"),
        }
    }

    /// Graphs enter community detection as `H = A`.
    fn hamiltonian(&self) -> Hamiltonian {
        match self {
            Loaded::Graph(g) => adjacency_hamiltonian(g),
            Loaded::Hamiltonian(h) => h.clone(),
        }
    }
}

fn load(input: &Input, manifest: &mut RunManifest) -> Result<Loaded> {
    if let Some(p) = &input.graph {
        manifest.input(p)?;
        return Ok(Loaded::Graph(load_graph(p, GraphFormat::from_path(p))?.graph));
    }
    if let Some(p) = &input.hamiltonian {
        manifest.input(p)?;
        return Ok(Loaded::Hamiltonian(load_hamiltonian(p)?));
    }
    let name = input.fixture.as_deref().unwrap_or_default();
    if let Some(g) = graph_by_name(name) {
        return Ok(Loaded::Graph(g));
    }
    hamiltonian_by_name(name).map(Loaded::Hamiltonian).ok_or_else(|| anyhow!("unknown fixture {name:?}"))
}

fn initial_state(spec: &str, manifest: &mut RunManifest) -> Result<InitialState> {
    if spec == "uniform" {
        return Ok(InitialState::UniformSuperposition);
    }
    if let Some(i) = spec.strip_prefix("node:") {
        return Ok(InitialState::Localized(i.parse().with_context(|| format!("bad node index {i:?}"))?));
    }
    let path = Path::new(spec);
    manifest.input(path)?;
    let rho = load_hamiltonian(path)?.into_matrix();
    Ok(InitialState::Custom(DensityMatrix::new(rho)?))
}

fn horizon(t: &str) -> Result<Horizon> {
    if t == "inf" {
        return Ok(Horizon::Infinite);
    }
    let v: f64 = t.parse().with_context(|| format!("bad time {t:?}"))?;
    if !(v.is_finite() && v >= 0.0) {
        bail!("time must be finite and non-negative, got {v}");
    }
    Ok(Horizon::Finite(v))
}

fn json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string(value)?)
}

pub fn gen(a: &GenArgs) -> Result<()> {
    let spec = match a.model {
        ModelArg::Ba => GenSpec::Ba { n: a.n, m_attach: a.m_attach, seed: a.seed },
        ModelArg::Er => GenSpec::Er { n: a.n, m: a.m, seed: a.seed },
        ModelArg::Ws => GenSpec::Ws { n: a.n, m: a.m, k: a.k, seed: a.seed },
        ModelArg::Rg => GenSpec::Rg { n: a.n, m: a.m, seed: a.seed },
        ModelArg::Planted => {
            let (p_in, p_out) = match (a.p_intra, a.p_inter) {
                (Some(i), Some(o)) => (i, o),
                (None, None) => planted_probabilities(&a.sizes, 6.0, 0.05)?,
                _ => bail!("--p-intra and --p-inter must be given together"),
            };
            GenSpec::Planted { sizes: a.sizes.clone(), p_intra: p_in, p_inter: p_out, seed: a.seed }
        }
    };
    let (graph, planted) = spec.generate()?;
    let mut manifest = RunManifest::new("gen", &serde_json::json!({ "args": a, "spec": spec }))?;
    manifest.seed(a.seed);
    let mut out = Outputs::new();
    out.add(a.out.out.as_deref(), graph_to_json(&LabeledGraph::new(graph, None)?));
    match (&a.partition_out, planted) {
        (Some(p), Some(part)) => out.add(Some(p), part.to_json()),
        (Some(_), None) => bail!("--partition-out only applies to the planted model"),
        _ => {}
    }
    out.finish(manifest)
}

pub fn randomize(a: &RandomizeArgs) -> Result<()> {
    let mut manifest = RunManifest::new("randomize", a)?;
    manifest.seed(a.seed);
    let g = load(&a.input, &mut manifest)?.graph()?;
    let r = randomize_weights(&g, a.target, a.max_iters, a.seed)?;
    eprintln!("epsilon = {}, converged = {}, accepted = {}", r.epsilon, r.converged, r.accepted);
    let mut out = Outputs::new();
    out.add(a.out.out.as_deref(), graph_to_json(&LabeledGraph::new(r.graph, None)?));
    out.finish(manifest)
}

#[derive(Serialize)]
struct WalkOutput {
    #[serde(flatten)]
    report: WalkReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    /// Diagonal of the state averaged over `[0, t]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    p_time_averaged: Option<Vec<f64>>,
}

pub fn walk(a: &WalkArgs) -> Result<()> {
    let mut manifest = RunManifest::new("walk", a)?;
    let loaded = load(&a.input, &mut manifest)?;
    let init = initial_state(&a.initial, &mut manifest)?;
    let (report, h) = match &loaded {
        Loaded::Graph(g) => (walk_report(g, &init)?, quantum_generator(g)?),
        Loaded::Hamiltonian(h) => (walk_report_for_hamiltonian(h, &init)?, h.clone()),
    };
    let p_time_averaged = match &a.t {
        Some(t) => {
            let dec = SpectralDecomposition::of(&h)?;
            Some(avg_density(&dec, &init, horizon(t)?)?.diagonal())
        }
        None => None,
    };
    let mut out = Outputs::new();
    out.add(a.out.out.as_deref(), json(&WalkOutput { report, t: a.t.clone(), p_time_averaged })?);
    out.finish(manifest)
}

#[derive(Serialize)]
struct QuantumnessOutput {
    epsilon: f64,
    epsilon_degree_form: f64,
    energy: f64,
    gap: f64,
    energy_gap_ratio: f64,
    energy_bound_ok: bool,
    entropy_bound: f64,
    entropy_bound_ok: bool,
}

/// Agreement required between the spectral and degree-form routes.
const ROUTE_TOLERANCE: f64 = 1e-9;

pub fn quantumness(a: &QuantumnessArgs) -> Result<()> {
    let mut manifest = RunManifest::new("quantumness", a)?;
    let g = load(&a.input, &mut manifest)?.graph()?;
    let rep = walk_report(&g, &InitialState::UniformSuperposition)?;
    let degree_form = quantumness_uniform_degree_form(&g)?;
    let diff = (rep.epsilon - degree_form).abs();
    if diff > ROUTE_TOLERANCE {
        return Err(qwalk::Error::EigenResidual { residual: diff, tolerance: ROUTE_TOLERANCE })
            .context("spectral and degree-form quantumness disagree");
    }
    let ratio = rep.energy / rep.gap;
    let result = QuantumnessOutput {
        epsilon: rep.epsilon,
        epsilon_degree_form: degree_form,
        energy: rep.energy,
        gap: rep.gap,
        energy_gap_ratio: ratio,
        energy_bound_ok: rep.epsilon <= ratio + ROUTE_TOLERANCE,
        entropy_bound: rep.entropy_bound,
        entropy_bound_ok: rep.epsilon <= rep.entropy_bound + ROUTE_TOLERANCE,
    };
    let mut out = Outputs::new();
    out.add(a.out.out.as_deref(), json(&result)?);
    out.finish(manifest)
}

enum Selection {
    Modularity,
    Level(usize),
}

impl FromStr for Selection {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "modularity" {
            return Ok(Selection::Modularity);
        }
        let k: usize = s
            .strip_prefix("k=")
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| anyhow!("--select expects modularity or k=K, got {s:?}"))?;
        if k == 0 {
            bail!("--select k=0 is not a valid community count");
        }
        Ok(Selection::Level(k))
    }
}

fn phases(spec: &str, measure: Measure, seed: u64) -> Result<Phases> {
    if spec == "zero" {
        return Ok(Phases::Zero);
    }
    let samples: usize = spec
        .strip_prefix("random:")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| anyhow!("--phases expects zero or random:SAMPLES, got {spec:?}"))?;
    if !matches!(measure, Measure::Fidelity(_)) {
        bail!("random phases only apply to fidelity closeness");
    }
    Ok(Phases::Random { samples, seed })
}

#[derive(Serialize)]
struct PartitionOutput<'a> {
    assignment: &'a [usize],
    k: usize,
    modularity: f64,
    closeness: String,
}

pub fn communities(a: &CommunitiesArgs) -> Result<()> {
    let measure: Measure = a.closeness.parse()?;
    let selection: Selection = a.select.parse()?;
    let phases = phases(&a.phases, measure, a.seed)?;
    let mut manifest = RunManifest::new("communities", a)?;
    manifest.seed(a.seed);
    let h = load(&a.input, &mut manifest)?.hamiltonian();
    let det = detect(&h, measure, phases, a.jitter, a.seed)?;
    let (partition, modularity) = match selection {
        Selection::Modularity => (det.partition, det.modularity),
        Selection::Level(k) => {
            let p = det.dendrogram.cut_k(k)?;
            let q = match signed_modularity(det.closeness.matrix(), &p) {
                Err(qwalk::Error::ZeroWeight) => 0.0,
                other => other?,
            };
            (p, q)
        }
    };
    let mut out = Outputs::new();
    let payload = PartitionOutput {
        assignment: partition.assignment(),
        k: partition.k(),
        modularity,
        closeness: measure.to_string(),
    };
    out.add(a.out.out.as_deref(), json(&payload)?);
    if let Some(p) = &a.dendrogram {
        out.add(Some(p), det.dendrogram.to_json());
    }
    out.finish(manifest)
}

fn load_partition(path: &Path, manifest: &mut RunManifest) -> Result<Partition> {
    manifest.input(path)?;
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing partition {}", path.display()))
}

pub fn nmi_cmd(a: &NmiArgs) -> Result<()> {
    let mut manifest = RunManifest::new("nmi", a)?;
    let x = load_partition(&a.first, &mut manifest)?;
    let y = load_partition(&a.second, &mut manifest)?;
    let mut out = Outputs::new();
    out.add(a.out.out.as_deref(), json(&serde_json::json!({ "nmi": nmi(&x, &y)? }))?);
    out.finish(manifest)
}

#[derive(Serialize)]
struct PhaseRow {
    sigma: f64,
    mean_nmi: f64,
    std_err: f64,
    samples: usize,
}

pub fn perturb(a: &PerturbArgs) -> Result<()> {
    let measure: Measure = a.closeness.parse()?;
    let mut manifest = RunManifest::new("perturb", a)?;
    manifest.seed(a.seed);
    let h = load(&a.input, &mut manifest)?.hamiltonian();
    let reference = detect(&h, measure, Phases::Zero, a.jitter, a.seed)?.partition;
    let mut rows = Vec::with_capacity(a.sigmas.len());
    for (i, &sigma) in a.sigmas.iter().enumerate() {
        let spec = PhasePerturbSpec { sigma, samples: a.samples, seed: replicate_seed(a.seed, i as u64) };
        let scores: Vec<f64> = perturb_phases(&h, &spec)?
            .par_iter()
            .enumerate()
            .map(|(s, hp)| {
                let det = detect(hp, measure, Phases::Zero, a.jitter, replicate_seed(spec.seed, s as u64))?;
                nmi(&det.partition, &reference)
            })
            .collect::<qwalk::Result<_>>()?;
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let var = if scores.len() > 1 { scores.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        rows.push(PhaseRow { sigma, mean_nmi: mean, std_err: (var / n).sqrt(), samples: scores.len() });
    }
    let payload = if a.csv {
        to_csv(&rows)?
    } else {
        json(&serde_json::json!({ "reference": reference, "rows": rows }))?
    };
    let mut out = Outputs::new();
    out.add(a.out.out.as_deref(), payload);
    out.finish(manifest)
}

#[derive(Serialize)]
struct SweepOutput {
    rows: Vec<SweepRow>,
    fit: FitResult,
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let model = match a.model {
        ModelArg::Ba => Model::Ba,
        ModelArg::Er => Model::Er,
        ModelArg::Ws => Model::Ws,
        ModelArg::Rg => Model::Rg,
        ModelArg::Planted => bail!("the planted model has no mean-degree sweep"),
    };
    let estimator = match a.estimator {
        EstimatorArg::DegreeMoments => Estimator::DegreeMoments,
        EstimatorArg::GiantComponent => Estimator::GiantComponent,
    };
    let mut manifest = RunManifest::new("sweep", a)?;
    manifest.seed(a.seed);
    let rows = quantumness_sweep(model, a.n, &a.degrees, a.replicates, a.seed, estimator)?;
    let payload = if a.csv {
        to_csv(&rows)?
    } else {
        let fit = fit_sweep(&rows)?;
        json(&SweepOutput { rows, fit })?
    };
    let mut out = Outputs::new();
    out.add(a.out.out.as_deref(), payload);
    out.finish(manifest)
}
