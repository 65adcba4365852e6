//! Design-scorer behavior: diversity filtering, ranking, judging through a
//! scripted backend, and verdict audit logging.

mod common;

use std::collections::VecDeque;
use std::sync::Mutex;

use cptkit::cml::{parse_cml, paths, CmlDocument};
use cptkit::color::Lab;
use cptkit::error::{EndpointError, ScorerError};
use cptkit::mask::{mask_class_of, MaskClass};
use cptkit::scorer::{
    diversity_filter, filter_variations, font_dissimilarity, mean_color_distance,
    rank_deterministic, rank_remote, rank_variations, Bucket, DiversityThresholds, JudgeBackend,
    JudgeClient, JudgeKind, PromptVersion, RankMode,
};
use cptkit::HexColor;

const FLYER: &str = include_str!("fixtures/thanksgiving.cml");

/// Scripted judge backend: pops canned responses, records calls.
struct ScriptedJudge {
    responses: Mutex<VecDeque<Result<String, EndpointError>>>,
    calls: Mutex<Vec<(String, usize)>>,
}

impl ScriptedJudge {
    fn new(responses: Vec<&str>) -> ScriptedJudge {
        ScriptedJudge {
            responses: Mutex::new(responses.into_iter().map(|s| Ok(s.to_string())).collect()),
            calls: Mutex::new(Vec::new()),
        }
    }

    fn failing() -> ScriptedJudge {
        ScriptedJudge {
            responses: Mutex::new(
                vec![Err(EndpointError::Transport { detail: "down".into() })].into(),
            ),
            calls: Mutex::new(Vec::new()),
        }
    }

    fn call_count(&self) -> usize {
        self.calls.lock().unwrap().len()
    }

    fn call(&self, index: usize) -> (String, usize) {
        self.calls.lock().unwrap()[index].clone()
    }
}

impl JudgeBackend for ScriptedJudge {
    fn complete(&self, prompt: &str, images: &[&[u8]]) -> Result<String, EndpointError> {
        self.calls
            .lock()
            .unwrap()
            .push((prompt.to_string(), images.len()));
        let mut responses = self.responses.lock().unwrap();
        match responses.len() {
            0 => Err(EndpointError::Transport { detail: "script exhausted".into() }),
            1 => responses.front().unwrap().clone(),
            _ => responses.pop_front().unwrap(),
        }
    }
}

/// Repaint every color site of the document with a hue rotation.
fn hue_rotated(doc: &CmlDocument, degrees: f64) -> CmlDocument {
    let transform = cptkit::predict::PaletteTransform {
        hue_rotation_deg: degrees,
        lightness_shift: 0.0,
    };
    let mut out = doc.clone();
    let sites: Vec<(String, String, String)> = doc
        .pages
        .iter()
        .flat_map(|p| p.elements.iter())
        .flat_map(|e| {
            paths::element_paths(e)
                .into_iter()
                .filter(|p| mask_class_of(p) == Some(MaskClass::Color))
                .filter_map(move |p| {
                    paths::element_get(e, &p).map(|v| (e.identity().to_string(), p, v))
                })
        })
        .collect();
    for (id, path, value) in sites {
        if let Ok(color) = value.parse::<HexColor>() {
            paths::set_attr(&mut out, &id, &path, &transform.apply(color).to_string()).unwrap();
        }
    }
    out
}

/// A one-color document whose palette sits at the given CIELAB lightness.
fn gray_doc(lightness: f64) -> CmlDocument {
    let (r, g, b) = Lab { l: lightness, a: 0.0, b: 0.0 }.to_rgb();
    let color = HexColor::Rgb(r, g, b);
    parse_cml(&format!(
        r##"<cml v="3" numberPages="1"><page width="100" height="100" format="x" layoutID="u">
        <background type="color" id="0"><bounds top="0" left="0" width="100" height="100" z-index="0" /><style color="{color}" /></background>
        </page></cml>"##
    ))
    .unwrap()
}

#[test]
fn identical_candidates_are_discarded() {
    let doc = parse_cml(FLYER).unwrap();
    let t = DiversityThresholds::default();
    assert!(diversity_filter(&doc, &[doc.clone()], &t).is_empty());

    // Two byte-identical diverse candidates: the first is kept, the
    // second adds nothing.
    let rotated = hue_rotated(&doc, 150.0);
    let kept = diversity_filter(&doc, &[rotated.clone(), rotated], &t);
    assert_eq!(kept, vec![0]);
}

#[test]
fn hue_rotated_candidate_is_kept() {
    let doc = parse_cml(FLYER).unwrap();
    let rotated = hue_rotated(&doc, 120.0);
    let distance = mean_color_distance(&doc, &rotated);
    assert!(distance >= 15.0, "mean distance {distance}");
    let kept = diversity_filter(&doc, &[rotated], &DiversityThresholds::default());
    assert_eq!(kept, vec![0]);
}

#[test]
fn font_change_alone_can_pass_the_filter() {
    let doc = parse_cml(FLYER).unwrap();
    let mut refonted = doc.clone();
    for page in &mut refonted.pages {
        for element in &mut page.elements {
            if let cptkit::cml::Element::Text(t) = element {
                for p in &mut t.paragraphs {
                    p.style.font = Some("Oswald-Regular".into());
                }
            }
        }
    }
    assert!(font_dissimilarity(&doc, &refonted) >= 0.5);
    let kept = diversity_filter(&doc, &[refonted], &DiversityThresholds::default());
    assert_eq!(kept, vec![0]);
}

#[test]
fn tighter_thresholds_never_grow_the_kept_set() {
    let doc = parse_cml(FLYER).unwrap();
    let candidates = vec![
        hue_rotated(&doc, 30.0),
        hue_rotated(&doc, 60.0),
        hue_rotated(&doc, 90.0),
        doc.clone(),
    ];
    let loose = DiversityThresholds { min_color_distance: 5.0, min_font_dissimilarity: 0.3 };
    let tight = DiversityThresholds { min_color_distance: 25.0, min_font_dissimilarity: 0.8 };
    let kept_loose = diversity_filter(&doc, &candidates, &loose);
    let kept_tight = diversity_filter(&doc, &candidates, &tight);
    assert!(
        kept_tight.iter().all(|i| kept_loose.contains(i)),
        "tight {kept_tight:?} not within loose {kept_loose:?}"
    );
}

#[test]
fn deterministic_rank_is_greedy_max_min() {
    let original = gray_doc(5.0);
    // Candidates at palette distances ~5, ~40, ~90 from the original.
    let candidates = vec![gray_doc(10.0), gray_doc(45.0), gray_doc(95.0)];
    let order = rank_deterministic(&original, &candidates);
    assert_eq!(order, vec![2, 1, 0], "farthest first, then max-min");
}

#[test]
fn single_candidate_ranks_alone() {
    let original = gray_doc(5.0);
    let candidates = vec![gray_doc(50.0)];
    assert_eq!(rank_deterministic(&original, &candidates), vec![0]);
}

#[test]
fn remote_rank_parses_an_ordering() {
    let backend = ScriptedJudge::new(vec!["2,0,1"]);
    let client = JudgeClient::new(&backend, PromptVersion::V2);
    let renders = vec![vec![1u8], vec![2u8], vec![3u8]];
    let order = rank_remote(&client, &[0u8], &renders).unwrap();
    assert_eq!(order, vec![2, 0, 1]);
    // Prompt plus one image per candidate and the original.
    assert_eq!(backend.call(0).1, 4);
}

#[test]
fn remote_rank_rejects_non_permutations() {
    for bad in ["2,2,1", "0,1", "banana", "0,1,2,3"] {
        let backend = ScriptedJudge::new(vec![bad]);
        let client = JudgeClient::new(&backend, PromptVersion::V2);
        let renders = vec![vec![1u8], vec![2u8], vec![3u8]];
        assert!(
            matches!(
                rank_remote(&client, &[0u8], &renders),
                Err(ScorerError::UnparseableVerdict { .. })
            ),
            "{bad:?} should not parse"
        );
    }
}

#[test]
fn rank_variations_falls_back_to_deterministic() {
    let original = gray_doc(5.0);
    let candidates = vec![gray_doc(10.0), gray_doc(45.0), gray_doc(95.0)];
    let backend = ScriptedJudge::failing();
    let client = JudgeClient::new(&backend, PromptVersion::V2);
    let renders = vec![vec![1u8], vec![2u8], vec![3u8]];
    let order = rank_variations(
        &original,
        &candidates,
        RankMode::Remote {
            client: &client,
            original_render: &[0u8],
            candidate_renders: &renders,
        },
    );
    assert_eq!(order, vec![2, 1, 0], "deterministic fallback order");
}

#[test]
fn verdict_retries_once_with_a_format_reminder() {
    let backend = ScriptedJudge::new(vec![
        "maybe: dunno",
        "clear_pass: All elements are clearly visible and readable.",
    ]);
    let client = JudgeClient::new(&backend, PromptVersion::V2);
    let v = client.verdict(JudgeKind::Contrast, &[1u8], &[2u8]).unwrap();
    assert_eq!(v.bucket, Bucket::ClearPass);
    assert_eq!(backend.call_count(), 2);
    assert!(backend.call(1).0.contains("Respond using this exact format"));

    // Two malformed answers surface the parse failure.
    let backend = ScriptedJudge::new(vec!["maybe: dunno"]);
    let client = JudgeClient::new(&backend, PromptVersion::V2);
    assert!(matches!(
        client.verdict(JudgeKind::Contrast, &[1u8], &[2u8]),
        Err(ScorerError::UnparseableVerdict { .. })
    ));
    assert_eq!(backend.call_count(), 2);
}

#[test]
fn filter_keeps_passing_and_borderline_candidates() {
    // Candidate 0: pass/pass. Candidate 1: contrast clear_fail (alignment
    // never asked). Candidate 2: borderline contrast + clear_pass
    // alignment.
    let backend = ScriptedJudge::new(vec![
        "clear_pass: looks fine.",
        "clear_pass: aligned.",
        "clear_fail: The red text in the footer is unreadable against the dark background.",
        "borderline: text abc is slightly harder to read, might be acceptable.",
        "clear_pass: no new alignment issues.",
    ]);
    let client = JudgeClient::new(&backend, PromptVersion::V2);
    let renders = vec![vec![1u8], vec![2u8], vec![3u8]];
    let kept = filter_variations(&client, &[0u8], &renders).unwrap();
    assert_eq!(kept, vec![0, 2]);
    assert_eq!(backend.call_count(), 5, "failed contrast short-circuits alignment");
}

#[test]
fn borderline_upgrade_does_not_change_filtering() {
    let with_borderline = ScriptedJudge::new(vec![
        "borderline: slightly soft.",
        "borderline: slightly shifted.",
    ]);
    let upgraded = ScriptedJudge::new(vec!["clear_pass: fine.", "clear_pass: fine."]);
    let renders = vec![vec![1u8]];
    let kept_a = filter_variations(
        &JudgeClient::new(&with_borderline, PromptVersion::V2),
        &[0u8],
        &renders,
    )
    .unwrap();
    let kept_b = filter_variations(
        &JudgeClient::new(&upgraded, PromptVersion::V2),
        &[0u8],
        &renders,
    )
    .unwrap();
    assert_eq!(kept_a, kept_b);
}

#[test]
fn v1_prompts_map_binary_answers() {
    let backend = ScriptedJudge::new(vec!["no. Everything is readable."]);
    let client = JudgeClient::new(&backend, PromptVersion::V1);
    let v = client.verdict(JudgeKind::Contrast, &[1u8], &[2u8]).unwrap();
    assert_eq!(v.bucket, Bucket::ClearPass);
    // The v1 prompt was actually sent.
    assert!(backend.call(0).0.contains("original template (first image)"));
}

#[test]
fn audit_log_records_bucket_and_prompt_hash() {
    use std::io::Cursor;
    use std::sync::{Arc, Mutex};

    #[derive(Clone)]
    struct SharedBuf(Arc<Mutex<Cursor<Vec<u8>>>>);
    impl std::io::Write for SharedBuf {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            self.0.lock().unwrap().write(buf)
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    let buffer = SharedBuf(Arc::new(Mutex::new(Cursor::new(Vec::new()))));
    let backend = ScriptedJudge::new(vec!["clear_fail: header text vanished."]);
    let client =
        JudgeClient::new(&backend, PromptVersion::V2).with_log(Box::new(buffer.clone()));
    client.verdict(JudgeKind::Contrast, &[1u8], &[2u8]).unwrap();

    let bytes = buffer.0.lock().unwrap().get_ref().clone();
    let line = String::from_utf8(bytes).unwrap();
    let record: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(record["bucket"], "clear_fail");
    assert_eq!(record["kind"], "contrast");
    assert_eq!(record["promptVersion"], "v2");
    assert_eq!(
        record["promptSha256"].as_str().unwrap(),
        cptkit::scorer::prompts::prompt_sha256(JudgeKind::Contrast, PromptVersion::V2)
    );
}
