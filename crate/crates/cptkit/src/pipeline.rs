//! End-to-end orchestration: load, mask, predict, infill, render, score,
//! filter, rank, and write artifacts, plus the batch evaluation entry
//! points behind the command-line interface.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cml::{parse_cml, serialize_cml, validate, Brand, CmlDocument};
use crate::error::{EndpointError, PredictError};
use crate::heuristics::{corpus_report, score, ChosenRateTable, HeuristicReport, MetricKind};
use crate::infill::{diff, infill_with, EditOp, FontPolicy, InfillOptions, PredictionSet};
use crate::mask::{apply_masks, plan_masks, AssociationMode, MaskBinding, MaskClass};
use crate::predict::{predict, EndpointConfig, PredictRequest, PredictorKind};
use crate::render::{render_svg, RenderOptions};
use crate::scorer::{
    diversity_filter, rank_variations, Bucket, ConfusionMatrix, DiversityThresholds, JudgeClient,
    JudgeKind, PromptVersion, RankMode, RemoteJudge, Thumb, TriageVerdict,
};

/// Which pipeline stage an error belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Stage {
    Input,
    Mask,
    Predict,
    Infill,
    Render,
    Score,
    Filter,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Input => "INPUT",
            Stage::Mask => "MASK",
            Stage::Predict => "PREDICT",
            Stage::Infill => "INFILL",
            Stage::Render => "RENDER",
            Stage::Score => "SCORE",
            Stage::Filter => "FILTER",
            Stage::Output => "OUTPUT",
        };
        f.write_str(name)
    }
}

/// A fatal pipeline error with stage attribution.
#[derive(Debug, Clone, Error)]
#[error("[{stage}] {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
    endpoint: bool,
}

impl PipelineError {
    /// A user-input problem (stage INPUT, CLI exit code 2).
    pub fn input(message: impl fmt::Display) -> PipelineError {
        PipelineError::at(Stage::Input, message)
    }

    /// A remote endpoint problem (CLI exit code 3).
    pub fn endpoint_failure(message: impl fmt::Display) -> PipelineError {
        PipelineError::endpoint(Stage::Predict, message)
    }

    fn at(stage: Stage, message: impl fmt::Display) -> PipelineError {
        PipelineError {
            stage,
            message: message.to_string(),
            endpoint: false,
        }
    }

    fn endpoint(stage: Stage, message: impl fmt::Display) -> PipelineError {
        PipelineError {
            stage,
            message: message.to_string(),
            endpoint: true,
        }
    }

    /// Bad or missing user input (CLI exit code 2).
    pub fn is_input(&self) -> bool {
        matches!(self.stage, Stage::Input | Stage::Mask) && !self.endpoint
    }

    /// A remote endpoint failed (CLI exit code 3).
    pub fn is_endpoint(&self) -> bool {
        self.endpoint
    }
}

/// Which predictor backs a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorChoice {
    /// Palette baseline when COLOR is masked, font baseline otherwise.
    Auto,
    Palette,
    Font,
    Remote,
}

impl PredictorChoice {
    pub fn parse(s: &str) -> Option<PredictorChoice> {
        match s.to_ascii_lowercase().as_str() {
            "auto" | "baseline" => Some(PredictorChoice::Auto),
            "palette" | "baseline-palette" => Some(PredictorChoice::Palette),
            "font" | "baseline-font" => Some(PredictorChoice::Font),
            "remote" => Some(PredictorChoice::Remote),
            _ => None,
        }
    }

    fn resolve(&self, classes: &BTreeSet<MaskClass>) -> Result<PredictorKind, PipelineError> {
        match self {
            PredictorChoice::Palette => Ok(PredictorKind::BaselinePalette),
            PredictorChoice::Font => Ok(PredictorKind::BaselineFont),
            PredictorChoice::Auto => {
                if classes.contains(&MaskClass::Color) {
                    Ok(PredictorKind::BaselinePalette)
                } else {
                    Ok(PredictorKind::BaselineFont)
                }
            }
            PredictorChoice::Remote => {
                let cfg = EndpointConfig::from_env()
                    .map_err(|e| PipelineError::endpoint(Stage::Predict, e))?;
                Ok(PredictorKind::Remote(cfg))
            }
        }
    }
}

/// Full configuration of one `generate` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub classes: BTreeSet<MaskClass>,
    pub mode: AssociationMode,
    pub variations: u32,
    pub max_variations: u32,
    pub temperature: f64,
    pub seed: u64,
    pub predictor: PredictorChoice,
    pub brand_path: Option<PathBuf>,
    pub thresholds: DiversityThresholds,
    pub judge: bool,
    pub prompt_version: PromptVersion,
    pub font_policy: FontPolicy,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            out_dir: PathBuf::new(),
            classes: [MaskClass::Color].into_iter().collect(),
            mode: AssociationMode::Global,
            variations: 4,
            max_variations: 16,
            temperature: 0.8,
            seed: 0,
            predictor: PredictorChoice::Auto,
            brand_path: None,
            thresholds: DiversityThresholds::default(),
            judge: false,
            prompt_version: PromptVersion::V2,
            font_policy: FontPolicy::Lenient,
            workers: 4,
        }
    }
}

/// Partial configuration, as read from a JSON config file; explicit flags
/// override file values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigPatch {
    pub input: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Class names as on the command line (e.g. `["color", "font"]`).
    pub classes: Option<Vec<String>>,
    pub mode: Option<String>,
    pub variations: Option<u32>,
    pub max_variations: Option<u32>,
    pub temperature: Option<f64>,
    pub seed: Option<u64>,
    pub predictor: Option<String>,
    pub brand_path: Option<PathBuf>,
    pub min_color_distance: Option<f64>,
    pub min_font_dissimilarity: Option<f64>,
    pub judge: Option<bool>,
    pub prompt_version: Option<String>,
    pub strict_fonts: Option<bool>,
    pub workers: Option<usize>,
}

impl RunConfigPatch {
    pub fn from_json(text: &str) -> Result<RunConfigPatch, PipelineError> {
        serde_json::from_str(text)
            .map_err(|e| PipelineError::at(Stage::Input, format!("config file: {e}")))
    }

    pub fn apply(&self, config: &mut RunConfig) -> Result<(), PipelineError> {
        let input_err = |what: &str, v: &str| {
            PipelineError::at(Stage::Input, format!("unknown {what} \"{v}\""))
        };
        if let Some(v) = &self.input {
            config.input = v.clone();
        }
        if let Some(v) = &self.out_dir {
            config.out_dir = v.clone();
        }
        if let Some(names) = &self.classes {
            let mut classes = BTreeSet::new();
            for name in names {
                for class in MaskClass::parse_cli(name).ok_or_else(|| input_err("mask class", name))? {
                    classes.insert(class);
                }
            }
            config.classes = classes;
        }
        if let Some(v) = &self.mode {
            config.mode = AssociationMode::parse(v).ok_or_else(|| input_err("association mode", v))?;
        }
        if let Some(v) = self.variations {
            config.variations = v;
        }
        if let Some(v) = self.max_variations {
            config.max_variations = v;
        }
        if let Some(v) = self.temperature {
            config.temperature = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = &self.predictor {
            config.predictor = PredictorChoice::parse(v).ok_or_else(|| input_err("predictor", v))?;
        }
        if let Some(v) = &self.brand_path {
            config.brand_path = Some(v.clone());
        }
        if let Some(v) = self.min_color_distance {
            config.thresholds.min_color_distance = v;
        }
        if let Some(v) = self.min_font_dissimilarity {
            config.thresholds.min_font_dissimilarity = v;
        }
        if let Some(v) = self.judge {
            config.judge = v;
        }
        if let Some(v) = &self.prompt_version {
            config.prompt_version = match v.to_ascii_lowercase().as_str() {
                "v1" => PromptVersion::V1,
                "v2" => PromptVersion::V2,
                _ => return Err(input_err("prompt version", v)),
            };
        }
        if let Some(v) = self.strict_fonts {
            config.font_policy = if v { FontPolicy::Strict } else { FontPolicy::Lenient };
        }
        if let Some(v) = self.workers {
            config.workers = v.max(1);
        }
        Ok(())
    }
}

/// Judge verdicts for one variation. Alignment is absent when the
/// contrast check already failed (the pair is never judged further).
#[derive(Debug, Clone, Serialize)]
pub struct VariationVerdicts {
    pub contrast: TriageVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment: Option<TriageVerdict>,
}

/// One generated variation with everything the run learned about it.
#[derive(Debug, Clone)]
pub struct Variation {
    pub index: u32,
    pub document: CmlDocument,
    pub predictions: PredictionSet,
    pub edits: Vec<EditOp>,
    pub heuristics: HeuristicReport,
    pub svg: String,
    /// No heuristic check that passed on the original regressed.
    pub heuristic_gate: bool,
    pub diverse: bool,
    pub verdicts: Option<VariationVerdicts>,
    pub kept: bool,
    pub rank: Option<u32>,
}

/// A variation that failed mid-pipeline; recorded, never silently dropped.
#[derive(Debug, Clone, Serialize)]
pub struct VariationFailure {
    pub index: u32,
    pub stage: Stage,
    pub error: String,
    pub endpoint: bool,
}

/// Everything a `generate` run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub original: CmlDocument,
    pub original_report: HeuristicReport,
    pub bindings: Vec<MaskBinding>,
    pub variations: Vec<Variation>,
    pub failures: Vec<VariationFailure>,
    /// Kept variation indices in rank order.
    pub kept: Vec<u32>,
    pub report_path: PathBuf,
    pub endpoint_failures: usize,
}

/// Run the full variation pipeline and write artifacts into the output
/// directory: `masked.cml`, `bindings.json`, `original.svg`, one
/// `variation_k.cml` / `variation_k.svg` pair per generated variation and
/// a `report.json` manifest. Fixed (config, seed) reruns are byte-stable.
pub fn generate(config: &RunConfig) -> Result<RunOutcome, PipelineError> {
    if config.variations < 1 || config.variations > config.max_variations {
        return Err(PipelineError::at(
            Stage::Input,
            format!(
                "variations must be in 1..={}, got {}",
                config.max_variations, config.variations
            ),
        ));
    }
    let text = fs::read_to_string(&config.input)
        .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", config.input.display())))?;
    let original = parse_cml(&text)
        .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", config.input.display())))?;
    let violations = validate(&original);
    if !violations.is_empty() {
        return Err(PipelineError::at(
            Stage::Input,
            format!("input fails validation: {}", violations[0]),
        ));
    }
    let brand: Option<Brand> = match &config.brand_path {
        None => None,
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", path.display())))?;
            Some(serde_json::from_str(&text).map_err(|e| {
                PipelineError::at(Stage::Input, format!("{}: {e}", path.display()))
            })?)
        }
    };

    let kind = config.predictor.resolve(&config.classes)?;
    let plan = plan_masks(&original, &config.classes, config.mode, None)
        .map_err(|e| PipelineError::at(Stage::Mask, e))?;
    let (masked_cml, bindings) =
        apply_masks(&original, &plan).map_err(|e| PipelineError::at(Stage::Mask, e))?;

    let render_options = RenderOptions::default();
    let original_report = score(&original);
    let original_svg = render_svg(&original, &render_options);
    let infill_options = InfillOptions {
        font_policy: config.font_policy,
        extra_fonts: brand.as_ref().map(|b| b.fonts.clone()).unwrap_or_default(),
    };

    // Variations are independent; run them on a bounded pool. Results
    // come back in index order.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| PipelineError::at(Stage::Predict, e))?;
    let results: Vec<Result<Variation, VariationFailure>> = pool.install(|| {
        (0..config.variations)
            .into_par_iter()
            .map(|index| {
                run_one(
                    index,
                    config,
                    &kind,
                    &original,
                    &original_report,
                    &masked_cml,
                    &bindings,
                    &plan,
                    brand.clone(),
                    &infill_options,
                    &render_options,
                )
            })
            .collect()
    });

    let mut variations: Vec<Variation> = Vec::new();
    let mut failures: Vec<VariationFailure> = Vec::new();
    for result in results {
        match result {
            Ok(v) => variations.push(v),
            Err(f) => failures.push(f),
        }
    }
    let mut endpoint_failures = failures.iter().filter(|f| f.endpoint).count();

    // Markup-level diversity among the heuristic survivors, in index
    // order.
    let gate_survivors: Vec<usize> = variations
        .iter()
        .enumerate()
        .filter(|(_, v)| v.heuristic_gate)
        .map(|(i, _)| i)
        .collect();
    let candidate_docs: Vec<CmlDocument> = gate_survivors
        .iter()
        .map(|&i| variations[i].document.clone())
        .collect();
    let diverse_positions = diversity_filter(&original, &candidate_docs, &config.thresholds);
    for &pos in &diverse_positions {
        variations[gate_survivors[pos]].diverse = true;
    }
    let mut kept_indices: Vec<usize> = diverse_positions
        .iter()
        .map(|&pos| gate_survivors[pos])
        .collect();

    // Rendition-based judging of the survivors.
    let judge_cfg = if config.judge {
        match EndpointConfig::judge_from_env() {
            Ok(cfg) => Some(cfg),
            Err(e) => return Err(PipelineError::endpoint(Stage::Filter, e)),
        }
    } else {
        None
    };
    if let Some(cfg) = &judge_cfg {
        let backend = RemoteJudge { cfg: cfg.clone() };
        let log_path = config.out_dir.join("verdicts.jsonl");
        fs::create_dir_all(&config.out_dir)
            .map_err(|e| PipelineError::at(Stage::Output, e))?;
        let log = fs::File::create(&log_path).map_err(|e| PipelineError::at(Stage::Output, e))?;
        let client = JudgeClient::new(&backend, config.prompt_version).with_log(Box::new(log));
        let renders: Vec<Vec<u8>> = kept_indices
            .iter()
            .map(|&i| variations[i].svg.clone().into_bytes())
            .collect();
        match judge_filter(&client, original_svg.as_bytes(), &renders) {
            Ok(verdicts) => {
                let mut surviving = Vec::new();
                for (pos, &index) in kept_indices.iter().enumerate() {
                    let (contrast, alignment, keep) = &verdicts[pos];
                    variations[index].verdicts = Some(VariationVerdicts {
                        contrast: contrast.clone(),
                        alignment: alignment.clone(),
                    });
                    if *keep {
                        surviving.push(index);
                    }
                }
                kept_indices = surviving;
            }
            Err(e) => {
                endpoint_failures += 1;
                failures.push(VariationFailure {
                    index: u32::MAX,
                    stage: Stage::Filter,
                    error: e.to_string(),
                    endpoint: true,
                });
            }
        }
        // Rank what survived, remote first.
        let kept_docs: Vec<CmlDocument> = kept_indices
            .iter()
            .map(|&i| variations[i].document.clone())
            .collect();
        let kept_renders: Vec<Vec<u8>> = kept_indices
            .iter()
            .map(|&i| variations[i].svg.clone().into_bytes())
            .collect();
        let order = rank_variations(
            &original,
            &kept_docs,
            RankMode::Remote {
                client: &client,
                original_render: original_svg.as_bytes(),
                candidate_renders: &kept_renders,
            },
        );
        kept_indices = order.into_iter().map(|pos| kept_indices[pos]).collect();
    } else {
        let kept_docs: Vec<CmlDocument> = kept_indices
            .iter()
            .map(|&i| variations[i].document.clone())
            .collect();
        let order = rank_variations(&original, &kept_docs, RankMode::Deterministic);
        kept_indices = order.into_iter().map(|pos| kept_indices[pos]).collect();
    }

    for (rank, &index) in kept_indices.iter().enumerate() {
        variations[index].kept = true;
        variations[index].rank = Some(rank as u32);
    }

    // Single-writer artifact emission.
    fs::create_dir_all(&config.out_dir).map_err(|e| PipelineError::at(Stage::Output, e))?;
    let write = |name: &str, bytes: &[u8]| -> Result<(), PipelineError> {
        fs::write(config.out_dir.join(name), bytes)
            .map_err(|e| PipelineError::at(Stage::Output, format!("{name}: {e}")))
    };
    write("masked.cml", masked_cml.as_bytes())?;
    write(
        "bindings.json",
        serde_json::to_string_pretty(&bindings).unwrap().as_bytes(),
    )?;
    write("original.svg", original_svg.as_bytes())?;
    for variation in &variations {
        write(
            &format!("variation_{}.cml", variation.index),
            serialize_cml(&variation.document).as_bytes(),
        )?;
        write(&format!("variation_{}.svg", variation.index), variation.svg.as_bytes())?;
    }

    let report_path = config.out_dir.join("report.json");
    let manifest = manifest_json(config, &original_report, &bindings, &variations, &failures, &kept_indices);
    write("report.json", manifest.as_bytes())?;

    Ok(RunOutcome {
        original,
        original_report,
        bindings,
        variations,
        failures,
        kept: kept_indices.into_iter().map(|i| i as u32).collect(),
        report_path,
        endpoint_failures,
    })
}

/// Contrast verdict, optional alignment verdict, and the keep decision per
/// candidate (alignment is skipped when contrast already failed).
type JudgedCandidate = (TriageVerdict, Option<TriageVerdict>, bool);

// Same keep rule as `scorer::filter_variations`, capturing the verdict
// pair for the manifest along the way.
fn judge_filter(
    client: &JudgeClient,
    original: &[u8],
    renders: &[Vec<u8>],
) -> Result<Vec<JudgedCandidate>, crate::error::ScorerError> {
    let mut out = Vec::with_capacity(renders.len());
    for render in renders {
        let contrast = client.verdict(JudgeKind::Contrast, original, render)?;
        if !contrast.bucket.is_pass() {
            out.push((contrast, None, false));
            continue;
        }
        let alignment = client.verdict(JudgeKind::Alignment, original, render)?;
        let keep = alignment.bucket.is_pass();
        out.push((contrast, Some(alignment), keep));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    index: u32,
    config: &RunConfig,
    kind: &PredictorKind,
    original: &CmlDocument,
    original_report: &HeuristicReport,
    masked_cml: &str,
    bindings: &[MaskBinding],
    plan: &crate::mask::MaskPlan,
    brand: Option<Brand>,
    infill_options: &InfillOptions,
    render_options: &RenderOptions,
) -> Result<Variation, VariationFailure> {
    let fail = |stage: Stage, endpoint: bool, e: &dyn fmt::Display| VariationFailure {
        index,
        stage,
        error: e.to_string(),
        endpoint,
    };
    let request = PredictRequest {
        masked_cml: masked_cml.to_string(),
        bindings: bindings.to_vec(),
        temperature: config.temperature,
        seed: config.seed,
        brand,
        variant_index: index,
    };
    let predictions = predict(&request, kind).map_err(|e| {
        let endpoint = matches!(e, PredictError::Endpoint(_));
        fail(Stage::Predict, endpoint, &e)
    })?;
    let document = infill_with(original, plan, &predictions, infill_options)
        .map_err(|e| fail(Stage::Infill, false, &e))?;
    let edits = diff(original, &document).map_err(|e| fail(Stage::Infill, false, &e))?;
    let svg = render_svg(&document, render_options);
    let heuristics = score(&document);
    let heuristic_gate = [
        MetricKind::GeneralOverlap,
        MetricKind::TextOverflow,
        MetricKind::TextOverBoundary,
        MetricKind::TextLineOverlap,
        MetricKind::ColorContrast,
    ]
    .into_iter()
    .all(|m| !original_report.passes(m) || heuristics.passes(m));
    Ok(Variation {
        index,
        document,
        predictions,
        edits,
        heuristics,
        svg,
        heuristic_gate,
        diverse: false,
        verdicts: None,
        kept: false,
        rank: None,
    })
}

fn manifest_json(
    config: &RunConfig,
    original_report: &HeuristicReport,
    bindings: &[MaskBinding],
    variations: &[Variation],
    failures: &[VariationFailure],
    kept: &[usize],
) -> String {
    #[derive(Serialize)]
    struct ManifestVariation<'a> {
        index: u32,
        cml: String,
        svg: String,
        predictions: &'a PredictionSet,
        edits: &'a [EditOp],
        heuristics: &'a HeuristicReport,
        #[serde(rename = "overallChosen")]
        overall_chosen: bool,
        #[serde(rename = "heuristicGate")]
        heuristic_gate: bool,
        diverse: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        verdicts: &'a Option<VariationVerdicts>,
        kept: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        rank: Option<u32>,
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        #[serde(rename = "schemaVersion")]
        schema_version: u32,
        config: &'a RunConfig,
        #[serde(rename = "originalHeuristics")]
        original_heuristics: &'a HeuristicReport,
        bindings: &'a [MaskBinding],
        variations: Vec<ManifestVariation<'a>>,
        failures: &'a [VariationFailure],
        /// Kept variation indices in rank order.
        kept: Vec<u32>,
    }
    let manifest = Manifest {
        schema_version: 1,
        config,
        original_heuristics: original_report,
        bindings,
        variations: variations
            .iter()
            .map(|v| ManifestVariation {
                index: v.index,
                cml: format!("variation_{}.cml", v.index),
                svg: format!("variation_{}.svg", v.index),
                predictions: &v.predictions,
                edits: &v.edits,
                heuristics: &v.heuristics,
                overall_chosen: v.heuristics.overall_chosen(),
                heuristic_gate: v.heuristic_gate,
                diverse: v.diverse,
                verdicts: &v.verdicts,
                kept: v.kept,
                rank: v.rank,
            })
            .collect(),
        failures,
        kept: kept.iter().map(|&i| i as u32).collect(),
    };
    let mut out = serde_json::to_string_pretty(&manifest).unwrap();
    out.push('\n');
    out
}

/// Score every `.cml` file in a directory and aggregate chosen rates per
/// label. Labels come from a `file,label` CSV; unlisted files fall under
/// `unlabeled`, and with no label file everything lands in `all`.
pub fn evaluate(
    corpus_dir: &Path,
    labels: Option<&Path>,
    out_csv: Option<&Path>,
) -> Result<ChosenRateTable, PipelineError> {
    let label_map: std::collections::BTreeMap<String, String> = match labels {
        None => Default::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", path.display())))?;
            let mut map = std::collections::BTreeMap::new();
            for (number, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || (number == 0 && line.eq_ignore_ascii_case("file,label")) {
                    continue;
                }
                let (file, label) = line.split_once(',').ok_or_else(|| {
                    PipelineError::at(
                        Stage::Input,
                        format!("{}:{} expected \"file,label\"", path.display(), number + 1),
                    )
                })?;
                map.insert(file.trim().to_string(), label.trim().to_string());
            }
            map
        }
    };

    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir)
        .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", corpus_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "cml"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(PipelineError::at(
            Stage::Input,
            format!("no .cml files in {}", corpus_dir.display()),
        ));
    }

    let mut items = Vec::with_capacity(files.len());
    for file in &files {
        let text = fs::read_to_string(file)
            .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", file.display())))?;
        let doc = parse_cml(&text)
            .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", file.display())))?;
        let name = file.file_name().unwrap().to_string_lossy().to_string();
        let label = match (label_map.get(&name), labels) {
            (Some(label), _) => label.clone(),
            (None, Some(_)) => "unlabeled".to_string(),
            (None, None) => "all".to_string(),
        };
        items.push((label, score(&doc)));
    }
    let table = corpus_report(&items);
    if let Some(path) = out_csv {
        fs::write(path, table.to_csv())
            .map_err(|e| PipelineError::at(Stage::Output, format!("{}: {e}", path.display())))?;
    }
    Ok(table)
}

/// Compare a verdict audit log against human thumb ratings.
///
/// The log is JSON lines with a `bucket` field (the format the judge
/// client writes); the human file is one `up`/`down` per line with an
/// optional `thumb` header. Lists align by order.
pub fn judge_eval(log: &Path, human: &Path) -> Result<(ConfusionMatrix, f64), PipelineError> {
    let log_text = fs::read_to_string(log)
        .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", log.display())))?;
    let mut buckets = Vec::new();
    for (number, line) in log_text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| {
            PipelineError::at(Stage::Input, format!("{}:{} {e}", log.display(), number + 1))
        })?;
        let bucket = match value.get("bucket").and_then(|b| b.as_str()) {
            Some("clear_pass") => Bucket::ClearPass,
            Some("borderline") => Bucket::Borderline,
            Some("clear_fail") => Bucket::ClearFail,
            other => {
                return Err(PipelineError::at(
                    Stage::Input,
                    format!("{}:{} unknown bucket {other:?}", log.display(), number + 1),
                ))
            }
        };
        buckets.push(bucket);
    }

    let human_text = fs::read_to_string(human)
        .map_err(|e| PipelineError::at(Stage::Input, format!("{}: {e}", human.display())))?;
    let mut thumbs = Vec::new();
    for (number, line) in human_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (number == 0 && line.eq_ignore_ascii_case("thumb")) {
            continue;
        }
        let thumb = Thumb::parse(line).ok_or_else(|| {
            PipelineError::at(
                Stage::Input,
                format!("{}:{} expected up or down", human.display(), number + 1),
            )
        })?;
        thumbs.push(thumb);
    }

    let matrix = ConfusionMatrix::from_pairs(&buckets, &thumbs)
        .map_err(|e| PipelineError::at(Stage::Input, e))?;
    let ups = thumbs.iter().filter(|t| **t == Thumb::Up).count() as u64;
    let rate = crate::scorer::percentage(ups, thumbs.len() as u64);
    Ok((matrix, rate))
}

/// Ignore the endpoint error type name in errors embedded as strings.
impl From<EndpointError> for PipelineError {
    fn from(e: EndpointError) -> Self {
        PipelineError::endpoint(Stage::Predict, e)
    }
}
