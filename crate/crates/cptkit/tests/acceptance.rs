//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]` line with its runtime (visible with `--nocapture`). Budgets
//! are asserted in-process.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::http_stub::{StubResponse, StubServer};
use cptkit::cml::{parse_cml, serialize_cml, validate};
use cptkit::color::contrast_ratio;
use cptkit::infill::{apply_edits, diff, infill, parse_predictions, PredictionSet};
use cptkit::mask::{apply_masks, plan_masks, AssociationMode, MaskClass};
use cptkit::pipeline::{generate, PredictorChoice, RunConfig};
use cptkit::predict::{baseline_font, baseline_palette, predict, EndpointConfig, PredictRequest, PredictorKind};
use cptkit::scorer::{percentage, ConfusionMatrix};
use cptkit::HexColor;
use rand::Rng;

const FLYER: &str = include_str!("fixtures/thanksgiving.cml");

fn done(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "{name} took {elapsed:?}, budget {budget:?}"
    );
    println!("[PASS] {name} ({:.2}s)", elapsed.as_secs_f64());
}

#[test]
fn criterion_round_trip_fidelity() {
    let started = Instant::now();
    let doc = parse_cml(FLYER).unwrap();
    let once = serialize_cml(&doc);
    let reparsed = parse_cml(&once).unwrap();
    assert_eq!(reparsed, doc, "parse -> serialize -> parse is structural identity");
    assert_eq!(serialize_cml(&reparsed), once, "serialize is idempotent");
    // Stronger: the canonical form reproduces the fixture byte for byte.
    assert_eq!(once, FLYER);
    done("round-trip fidelity", started, Duration::from_secs(1));
}

#[test]
fn criterion_pizza_infill_reproduction() {
    let started = Instant::now();
    let pizza = r##"<cml v="3" numberPages="1">
    <page width="1080" height="1080" format="social" layoutID="unknown">
        <text id="3">
            <bounds top="239" left="210" width="600" height="385" />
            <style alignment="center" />
            <p>
                <content>
                    Pizza
                </content>
                <style color="#261101" font="Poppins-Regular" size="374" />
            </p>
        </text>
    </page>
</cml>
"##;
    let doc = parse_cml(pizza).unwrap();
    let classes: BTreeSet<MaskClass> =
        [MaskClass::Color, MaskClass::Font, MaskClass::FontSize].into_iter().collect();
    let plan = plan_masks(&doc, &classes, AssociationMode::Local, None).unwrap();
    let (masked, bindings) = apply_masks(&doc, &plan).unwrap();

    // The masked element, exactly, in canonical form.
    let expected_fragment = concat!(
        "        <text id=\"3\">\n",
        "            <bounds top=\"239\" left=\"210\" width=\"600\" height=\"385\" />\n",
        "            <style alignment=\"center\" />\n",
        "            <p>\n",
        "                <content>\n",
        "                    Pizza\n",
        "                </content>\n",
        "                <style color=\"<MASK_COLOR_0>\" font=\"<MASK_FONT_0>\" size=\"<MASK_FONTSIZE_0>\" />\n",
        "            </p>\n",
        "        </text>\n",
    );
    assert!(
        masked.contains(expected_fragment),
        "masked fragment mismatch:\n{masked}"
    );

    let output = "### OUTPUT:\nMASK_COLOR_0: #fefcf0\nMASK_FONT_0: MeowScript-Regular\nMASK_FONTSIZE_0: 279\n";
    let predictions = parse_predictions(output, &bindings).unwrap();
    let infilled = infill(&doc, &plan, &predictions).unwrap();
    let text = serialize_cml(&infilled);
    assert!(
        text.contains("<style color=\"#fefcf0\" font=\"MeowScript-Regular\" size=\"279\" />"),
        "infilled values mismatch:\n{text}"
    );
    done("masked-fragment and infill reproduction", started, Duration::from_secs(1));
}

#[test]
fn criterion_association_mode_invariants() {
    let started = Instant::now();
    let doc = parse_cml(FLYER).unwrap();
    let color: BTreeSet<MaskClass> = [MaskClass::Color].into_iter().collect();

    // Independent oracle: count distinct normalized color values among
    // the masked sites by brute force.
    let global = plan_masks(&doc, &color, AssociationMode::Global, None).unwrap();
    let distinct: BTreeSet<&str> = global.sites.iter().map(|s| s.original.as_str()).collect();
    assert_eq!(global.token_count(), distinct.len());

    let none = plan_masks(&doc, &color, AssociationMode::None, None).unwrap();
    assert_eq!(none.token_count(), none.sites.len());

    // Ordering holds across 100 randomized documents and class sets.
    let mut rng = common::rng(2024);
    for _ in 0..100 {
        let doc = common::random_document(&mut rng);
        let mut classes: BTreeSet<MaskClass> = BTreeSet::new();
        classes.insert(MaskClass::Color);
        if rng.random_range(0..2) == 0 {
            classes.insert(MaskClass::Font);
        }
        if rng.random_range(0..2) == 0 {
            classes.insert(MaskClass::FontSize);
        }
        let g = plan_masks(&doc, &classes, AssociationMode::Global, None).unwrap().token_count();
        let l = plan_masks(&doc, &classes, AssociationMode::Local, None).unwrap().token_count();
        let n = plan_masks(&doc, &classes, AssociationMode::None, None).unwrap();
        assert!(g <= l && l <= n.token_count(), "ordering violated: {g} {l} {}", n.token_count());
        assert_eq!(n.token_count(), n.sites.len());
    }
    done("association-mode invariants", started, Duration::from_secs(5));
}

#[test]
fn criterion_self_infill_and_diff_apply() {
    let started = Instant::now();
    let mut rng = common::rng(77);

    // 100 randomized (document, plan) pairs: infilling the original
    // values reproduces the serialization byte-exactly.
    for case in 0..100 {
        let doc = common::random_document(&mut rng);
        let mut classes: BTreeSet<MaskClass> = BTreeSet::new();
        for class in [
            MaskClass::Color,
            MaskClass::Font,
            MaskClass::FontSize,
            MaskClass::Leading,
            MaskClass::BoundsTop,
            MaskClass::BoundsWidth,
        ] {
            if rng.random_range(0..2) == 0 {
                classes.insert(class);
            }
        }
        classes.insert(MaskClass::Color);
        let mode = [AssociationMode::None, AssociationMode::Local, AssociationMode::Global]
            [case % 3];
        let plan = plan_masks(&doc, &classes, mode, None).unwrap();
        let (masked, bindings) = apply_masks(&doc, &plan).unwrap();

        let mut restored = masked;
        let mut identity = PredictionSet::default();
        for binding in &bindings {
            restored = restored.replace(&binding.token, &binding.original);
            identity.insert(binding.name().to_string(), binding.original.clone());
        }
        assert_eq!(restored, serialize_cml(&doc), "case {case}: string self-infill");
        let infilled = infill(&doc, &plan, &identity).unwrap();
        assert_eq!(serialize_cml(&infilled), serialize_cml(&doc), "case {case}: typed self-infill");
    }

    // 100 randomized mutations: apply(diff(a, b), a) == b.
    for case in 0..100 {
        let original = common::random_document(&mut rng);
        let mut modified = original.clone();
        let all_paths = cptkit::cml::paths::document_paths(&original);
        for _ in 0..rng.random_range(1..5usize) {
            let (target, path) = all_paths[rng.random_range(0..all_paths.len())].clone();
            if let Some(class) = cptkit::mask::mask_class_of(&path) {
                let value = match class {
                    MaskClass::Color => common::color(&mut rng).to_string(),
                    MaskClass::Font => "Oswald-Regular".to_string(),
                    _ => rng.random_range(1..500).to_string(),
                };
                let _ = cptkit::cml::paths::set_attr(&mut modified, &target, &path, &value);
            }
        }
        let edits = diff(&original, &modified).unwrap();
        let applied = apply_edits(&original, &edits).unwrap();
        assert_eq!(applied, modified, "case {case}: diff-then-apply round trip");
    }
    done("self-infill identity and diff/apply", started, Duration::from_secs(10));
}

#[test]
fn criterion_contrast_formula() {
    let started = Instant::now();
    let black = HexColor::BLACK;
    let white = HexColor::WHITE;
    assert!((contrast_ratio(black, white) - 21.0).abs() <= 0.01);
    let gray: HexColor = "#777777".parse().unwrap();
    assert!((contrast_ratio(gray, white) - 4.48).abs() <= 0.02);
    let any: HexColor = "#bd521d".parse().unwrap();
    assert_eq!(contrast_ratio(any, any), 1.0);
    done("contrast formula", started, Duration::from_secs(1));
}

#[test]
fn criterion_heuristic_geometry_oracle() {
    let started = Instant::now();
    let mut rng = common::rng(9001);

    #[derive(Clone)]
    struct OracleRect {
        top: f64,
        left: f64,
        width: f64,
        height: f64,
        is_text: bool,
    }
    fn ios(a: &OracleRect, b: &OracleRect) -> f64 {
        let x = (a.left + a.width).min(b.left + b.width) - a.left.max(b.left);
        let y = (a.top + a.height).min(b.top + b.height) - a.top.max(b.top);
        if x <= 0.0 || y <= 0.0 {
            return 0.0;
        }
        (x * y) / (a.width * a.height).min(b.width * b.height)
    }

    for case in 0..500 {
        // Build a fixture whose exact footprints are independently
        // computable: single-word autoWidth texts with the default
        // metrics (advance 0.5 em, unit ink box), plus opaque shapes and
        // alpha-free images. Construction rules out backdrop exemptions:
        // sizes stay far below canvas coverage and every non-text element
        // paints above every text.
        let mut xml = String::from(
            r##"<cml v="3" numberPages="1"><page width="1000" height="1000" format="x" layoutID="u">
            <background type="color" id="bg"><bounds top="0" left="0" width="1000" height="1000" z-index="0" /><style color="#ffffff" /></background>"##,
        );
        let mut rects: Vec<OracleRect> = Vec::new();
        let n_text = rng.random_range(1..4);
        let n_other = rng.random_range(1..4);
        for t in 0..n_text {
            let len = rng.random_range(2..9u32);
            let word: String = (0..len).map(|i| (b'a' + ((t + i as usize) % 26) as u8) as char).collect();
            let fs = rng.random_range(10..80u32);
            let top = rng.random_range(0..900u32);
            let left = rng.random_range(0..900u32);
            let z = 1 + t as u32;
            xml.push_str(&format!(
                r##"<text id="t{t}"><bounds top="{top}" left="{left}" width="400" height="200" z-index="{z}" /><style alignment="left" layout="autoWidth" /><p><content>{word}</content><style color="#000000" size="{fs}" /></p></text>"##
            ));
            rects.push(OracleRect {
                top: top as f64,
                left: left as f64,
                width: 0.5 * len as f64 * fs as f64,
                height: fs as f64,
                is_text: true,
            });
        }
        for s in 0..n_other {
            let top = rng.random_range(0..700u32);
            let left = rng.random_range(0..700u32);
            let w = rng.random_range(20..400u32);
            let h = rng.random_range(20..400u32);
            let z = 10 + s as u32;
            if rng.random_range(0..2) == 0 {
                xml.push_str(&format!(
                    r##"<shape id="s{s}" type="Rectangle"><bounds top="{top}" left="{left}" width="{w}" height="{h}" z-index="{z}" /><style opacity="1" color="#336699" /></shape>"##
                ));
            } else {
                let cells = r##"c1="#112233" c2="#112233" c3="#112233" c4="#112233" c5="#112233" c6="#112233" c7="#112233" c8="#112233" c9="#112233""##;
                xml.push_str(&format!(
                    r#"<image id="s{s}" sourceType="designAsset" sourceId="1"><bounds top="{top}" left="{left}" width="{w}" height="{h}" z-index="{z}" /><content>photo</content><style blendMode="normal" hasAlpha="false" /><colorGrid {cells} /></image>"#
                ));
            }
            rects.push(OracleRect {
                top: top as f64,
                left: left as f64,
                width: w as f64,
                height: h as f64,
                is_text: false,
            });
        }
        xml.push_str("</page></cml>");
        let doc = parse_cml(&xml).unwrap();
        let report = cptkit::heuristics::score(&doc);

        // Brute-force oracle over the recomputed rectangles.
        let mut oracle_general = true;
        let mut oracle_text_line = true;
        for i in 0..rects.len() {
            for j in 0..rects.len() {
                if i == j {
                    continue;
                }
                let overlap = ios(&rects[i], &rects[j]) > 0.05;
                if overlap && i < j {
                    oracle_general = false;
                }
                if overlap && rects[i].is_text {
                    oracle_text_line = false;
                }
            }
        }
        assert_eq!(
            report.general_overlap, oracle_general,
            "case {case}: general overlap verdict diverges\n{xml}"
        );
        assert_eq!(
            report.text_line_overlap, oracle_text_line,
            "case {case}: text line overlap verdict diverges\n{xml}"
        );
    }
    done("heuristic geometry oracle (500 fixtures)", started, Duration::from_secs(20));
}

#[test]
fn criterion_confusion_matrix_arithmetic() {
    let started = Instant::now();
    // Reported reference figures carry one decimal; agreement is checked
    // within that resolution.
    let close = |x: f64, want: f64| (x - want).abs() < 0.1;

    let best = ConfusionMatrix::from_counts(561, 665, 201, 1547);
    assert_eq!(best.total(), 2974);
    let [fd, pd, fu, pu] = best.percentages();
    assert!(close(fd, 18.9) && close(pd, 22.4) && close(fu, 6.8) && close(pu, 52.0),
        "best-prompt percentages {:?}", best.percentages());
    let rendered = best.to_string();
    for cell in ["561 (18.9%)", "665 (22.4%)", "201 (6.8%)", "1547 (52.0%)"] {
        assert!(rendered.contains(cell), "{rendered}");
    }

    let v1 = ConfusionMatrix::from_counts(686, 1350, 76, 862);
    assert_eq!(v1.total(), 2974);
    let [fd, pd, fu, pu] = v1.percentages();
    assert!(close(fd, 23.1) && close(pd, 45.4) && close(fu, 2.5) && close(pu, 29.0),
        "first-prompt percentages {:?}", v1.percentages());

    assert!(close(percentage(2698, 2974), 90.7), "thumbs-up rate");
    done("confusion-matrix arithmetic", started, Duration::from_secs(1));
}

#[test]
fn criterion_brand_closure() {
    let started = Instant::now();
    let doc = parse_cml(FLYER).unwrap();
    let brand = doc.pages[0].brand.clone().unwrap();
    let brand_colors: BTreeSet<String> = brand.colors.iter().map(|c| c.to_string()).collect();
    let brand_fonts: BTreeSet<String> = brand.fonts.iter().cloned().collect();
    let classes: BTreeSet<MaskClass> = [MaskClass::Color, MaskClass::Font].into_iter().collect();
    let plan = plan_masks(&doc, &classes, AssociationMode::Global, None).unwrap();
    let (masked_cml, bindings) = apply_masks(&doc, &plan).unwrap();

    let assert_closed = |set: &PredictionSet, what: &str| {
        for binding in &bindings {
            let value = set.get(binding.name()).unwrap();
            match binding.class() {
                MaskClass::Color => assert!(brand_colors.contains(value), "{what}: color {value}"),
                MaskClass::Font => assert!(brand_fonts.contains(value), "{what}: font {value}"),
                _ => {}
            }
        }
    };

    // 50 baseline runs across seeds and variants, both baselines.
    for run in 0..50u64 {
        let request = PredictRequest {
            masked_cml: masked_cml.clone(),
            bindings: bindings.clone(),
            temperature: 1.0 + (run % 3) as f64 * 0.4,
            seed: run,
            brand: Some(brand.clone()),
            variant_index: (run % 5) as u32,
        };
        let palette = predict(&request, &PredictorKind::BaselinePalette).unwrap();
        assert_closed(&palette, "palette baseline");
        let font = predict(&request, &PredictorKind::BaselineFont).unwrap();
        assert_closed(&font, "font baseline");
        // The raw baselines are deterministic per (seed, variant).
        assert_eq!(
            baseline_palette(&bindings, run, (run % 5) as u32, 1.0),
            baseline_palette(&bindings, run, (run % 5) as u32, 1.0)
        );
        assert_eq!(
            baseline_font(&bindings, run, (run % 5) as u32, 1.0),
            baseline_font(&bindings, run, (run % 5) as u32, 1.0)
        );
    }

    // A stubbed remote endpoint answering with off-brand values is still
    // forced into the brand kit.
    let off_brand: String = bindings
        .iter()
        .map(|b| {
            let value = match b.class() {
                MaskClass::Color => "#123456".to_string(),
                MaskClass::Font => "Mystery-Sans".to_string(),
                _ => b.original.clone(),
            };
            format!("{}: {}\n", b.name(), value)
        })
        .collect();
    let server = StubServer::spawn(vec![StubResponse::json_completion(&off_brand)]);
    let mut cfg = EndpointConfig::new(&server.url);
    cfg.retries = 0;
    let request = PredictRequest {
        masked_cml: masked_cml.clone(),
        bindings: bindings.clone(),
        temperature: 0.8,
        seed: 1,
        brand: Some(brand.clone()),
        variant_index: 0,
    };
    let remote = predict(&request, &PredictorKind::Remote(cfg)).unwrap();
    assert_closed(&remote, "stubbed remote");
    done("brand closure (50 runs + stubbed remote)", started, Duration::from_secs(20));
}

#[test]
fn criterion_end_to_end_offline_run() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("input.cml");
    std::fs::write(&input, FLYER).unwrap();
    let config = RunConfig {
        input,
        out_dir: dir.path().join("a"),
        classes: [MaskClass::Color].into_iter().collect(),
        mode: AssociationMode::Global,
        variations: 3,
        seed: 7,
        temperature: 0.8,
        predictor: PredictorChoice::Palette,
        workers: 2,
        ..RunConfig::default()
    };
    let outcome = generate(&config).unwrap();
    assert_eq!(outcome.variations.len(), 3);
    assert!(outcome.failures.is_empty());

    let original = parse_cml(FLYER).unwrap();
    for k in 0..3u32 {
        let text = std::fs::read_to_string(config.out_dir.join(format!("variation_{k}.cml"))).unwrap();
        let doc = parse_cml(&text).unwrap();
        assert_eq!(validate(&doc), vec![], "variation {k} is valid");
        for edit in diff(&original, &doc).unwrap() {
            assert_eq!(
                cptkit::mask::mask_class_of(&edit.path),
                Some(MaskClass::Color),
                "variation {k} edit {} outside the requested class",
                edit.path
            );
        }
    }

    // Byte-identical across two runs with the same seed.
    let rerun = RunConfig {
        out_dir: dir.path().join("b"),
        ..config.clone()
    };
    generate(&rerun).unwrap();
    for k in 0..3 {
        for ext in ["cml", "svg"] {
            let a = std::fs::read(config.out_dir.join(format!("variation_{k}.{ext}"))).unwrap();
            let b = std::fs::read(rerun.out_dir.join(format!("variation_{k}.{ext}"))).unwrap();
            assert_eq!(a, b, "variation_{k}.{ext} differs across identical-seed runs");
        }
    }
    let a = std::fs::read(config.out_dir.join("masked.cml")).unwrap();
    let b = std::fs::read(rerun.out_dir.join("masked.cml")).unwrap();
    assert_eq!(a, b);
    done("end-to-end offline run", started, Duration::from_secs(10));
}
