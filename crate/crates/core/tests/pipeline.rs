use scale_bench::baseline::{
    examples, predict, read_predictions, train_linear, write_predictions, LabelSpace, Prediction, PredictionSet,
    TrainConfig,
};
use scale_bench::eval::{classification_metrics, manifesto_score_pairs, scale_error_report, DEFAULT_EPSILON};
use scale_bench::noisesim::{synthetic_corpus, SyntheticConfig};
use scale_bench::scales::{rile_class, RileScale};
use scale_bench::splits::{carve_dev, temporal_split};

#[test]
fn linear_baseline_recovers_synthetic_positions() {
    let corpus = synthetic_corpus(&SyntheticConfig {
        manifestos: 60,
        min_statements: 40,
        max_statements: 60,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let split = carve_dev(&temporal_split(&corpus, 2019, 2021).unwrap(), &corpus, 0.1, 1).unwrap();
    let train = examples(&corpus, &split.train, LabelSpace::Rile3);
    let dev = examples(&corpus, &split.dev, LabelSpace::Rile3);
    let cfg = TrainConfig {
        hash_bits: 14,
        ..TrainConfig::default()
    };
    let (model, log) = train_linear::<f64>(&train, &dev, LabelSpace::Rile3, &cfg).unwrap();
    assert!(log.selected_epoch >= 1);

    let test = examples(&corpus, &split.test, LabelSpace::Rile3);
    let pairs: Vec<(&str, &str)> = test.iter().map(|e| (e.id, e.text)).collect();
    let preds = predict(&model, &pairs, "linear", &split.name);

    let mut buf = Vec::new();
    write_predictions(&preds, &mut buf).unwrap();
    let preds = read_predictions(buf.as_slice()).unwrap();

    let gold: Vec<&str> = test.iter().map(|e| e.label.as_str()).collect();
    let pred: Vec<&str> = test.iter().map(|e| preds.get(e.id).unwrap().label.as_str()).collect();
    let m = classification_metrics(&gold, &pred, LabelSpace::Rile3).unwrap();
    assert!(m.accuracy > 0.6, "{m:?}");

    let ids: Vec<String> = split.test.iter().cloned().collect();
    let scores = manifesto_score_pairs::<f64>(&corpus, &ids, &preds, &RileScale::standard()).unwrap();
    let g: Vec<f64> = scores.iter().map(|s| s.gold).collect();
    let p: Vec<f64> = scores.iter().map(|s| s.pred).collect();
    let report = scale_error_report(&g, &p, DEFAULT_EPSILON).unwrap();
    assert!(report.spearman_r.unwrap() > 0.5, "{report:?}");
}

#[test]
fn collapsing_fine_predictions_commutes_with_scoring() {
    let corpus = synthetic_corpus(&SyntheticConfig {
        manifestos: 10,
        min_statements: 20,
        max_statements: 30,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let ids: Vec<String> = corpus.ids().map(str::to_owned).collect();
    let statements: Vec<_> = corpus.statements().collect();
    // A deterministic "fine" classifier that is wrong on every third statement.
    let donor = &statements[0].code;
    let fine: Vec<Prediction> = statements
        .iter()
        .enumerate()
        .map(|(i, s)| Prediction {
            statement_id: s.id.clone(),
            label: if i % 3 == 0 { donor.as_str() } else { s.code.as_str() }.to_owned(),
            probs: None,
        })
        .collect();
    let coarse: Vec<Prediction> = fine
        .iter()
        .map(|p| Prediction {
            label: rile_class(&p.label.parse().unwrap()).as_str().to_owned(),
            ..p.clone()
        })
        .collect();
    let fine_set = PredictionSet::from_predictions("fine", "all", fine.clone()).unwrap();
    let coarse_set = PredictionSet::from_predictions("coarse", "all", coarse.clone()).unwrap();
    let scale = RileScale::standard();
    assert_eq!(
        manifesto_score_pairs::<f64>(&corpus, &ids, &fine_set, &scale).unwrap(),
        manifesto_score_pairs::<f64>(&corpus, &ids, &coarse_set, &scale).unwrap()
    );

    let gold: Vec<&str> = statements.iter().map(|s| rile_class(&s.code).as_str()).collect();
    let collapsed: Vec<&str> = coarse.iter().map(|p| p.label.as_str()).collect();
    let m = classification_metrics(&gold, &collapsed, LabelSpace::Rile3).unwrap();
    assert!(m.accuracy >= 2.0 / 3.0 - 1e-9);
}
