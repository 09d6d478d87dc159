use anyhow::{Context, Result};
use scale_bench::baseline::{
    examples, load_model, majority_label, predict as predict_linear, save_model, train_linear, write_predictions,
    LabelSpace, Model, TrainConfig,
};

use super::{load_corpus, load_split, open};
use crate::output::{outln, sidecar, write_atomic, write_json, Manifest};
use crate::{ModelKind, PredictArgs, Subset, TrainArgs};

pub fn train(a: &TrainArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let split = load_split(&a.split, &corpus)?;
    let space: LabelSpace = a.space.into();
    let train_ex = examples(&corpus, &split.train, space);
    let dev_ex = examples(&corpus, &split.dev, space);
    let (model, log) = match a.model {
        ModelKind::Majority => {
            let m = majority_label(train_ex.iter().map(|e| e.label.as_str()), space)?;
            (Model::Majority(m), None)
        }
        ModelKind::Linear => {
            let config = TrainConfig {
                epochs: a.epochs,
                learning_rate: a.lr,
                seed: a.seed,
                hash_bits: a.hash_bits,
                batch_size: a.batch_size,
                dev_checkpoint: !a.no_dev_checkpoint,
            };
            let (m, log) = train_linear::<f64>(&train_ex, &dev_ex, space, &config)
                .with_context(|| format!("training on split {}", split.name))?;
            (Model::Linear(m), Some(log))
        }
    };
    write_atomic(&a.out, |w| Ok(save_model(&model, w)?))?;
    let mut m = Manifest::new("train", a);
    m.input(&a.corpus)?;
    m.input(&a.split)?;
    m.output(&a.out);
    if let Some(log) = &log {
        let log_path = sidecar(&a.out, "log.json");
        write_json(&log_path, log)?;
        m.output(&log_path);
    }
    m.write_beside(&a.out)?;
    let summary = serde_json::json!({
        "model": model.kind(),
        "space": space.as_str(),
        "split": split.name,
        "train_statements": train_ex.len(),
        "dev_statements": dev_ex.len(),
        "selected_epoch": log.as_ref().map(|l| l.selected_epoch),
    });
    outln!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

pub fn predict(a: &PredictArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let model = load_model(open(&a.model)?).with_context(|| format!("model {}", a.model.display()))?;
    let (split_name, ids): (String, Vec<String>) = match &a.split {
        Some(p) => {
            let s = load_split(p, &corpus)?;
            let ids = match a.subset {
                Subset::Train => s.train.iter().cloned().collect(),
                Subset::Dev => s.dev.iter().cloned().collect(),
                Subset::Test => s.test.iter().cloned().collect(),
                Subset::All => s.all_ids().cloned().collect(),
            };
            (s.name, ids)
        }
        None => ("all".to_owned(), corpus.ids().map(str::to_owned).collect()),
    };
    let name = a.name.clone().unwrap_or_else(|| model.kind().to_owned());
    let stmts: Vec<(&str, &str)> = ids
        .iter()
        .filter_map(|id| corpus.get(id))
        .flat_map(|m| m.statements.iter().map(|s| (s.id.as_str(), s.text.as_str())))
        .collect();
    let preds = match &model {
        Model::Linear(m) => predict_linear(m, &stmts, &name, &split_name),
        Model::Majority(m) => m.predict(stmts.iter().map(|s| s.0), &name, &split_name)?,
    };
    write_atomic(&a.out, |w| Ok(write_predictions(&preds, w)?))?;
    let mut m = Manifest::new("predict", a);
    m.input(&a.corpus)?;
    m.input(&a.model)?;
    if let Some(p) = &a.split {
        m.input(p)?;
    }
    m.output(&a.out);
    m.write_beside(&a.out)?;
    outln!("{}", serde_json::json!({ "predictions": preds.len(), "model": name, "split": split_name }));
    Ok(())
}
