use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Manifesto, Statement, YearMonth};
use crate::error::{Error, Result};
use crate::scales::registry::{self, CategoryKind, RILE_LEFT, RILE_RIGHT};
use crate::scales::{CategoryCode, RileClass};

const CLASS_WORDS: usize = 40;
const COMMON_WORDS: usize = 300;

/// Parameters of the synthetic manifesto generator.
///
/// Each manifesto draws a latent position `u` uniformly from `[-1, 1]`; its
/// statements are Left with probability `left_share - spread * u`, Right with
/// probability `right_share + spread * u`, and Other otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticConfig {
    pub manifestos: usize,
    pub countries: usize,
    pub min_statements: usize,
    pub max_statements: usize,
    pub start_year: u16,
    pub end_year: u16,
    pub left_share: f64,
    pub right_share: f64,
    pub spread: f64,
    /// Fraction of a statement's tokens drawn from its class vocabulary.
    pub signal: f64,
    /// Emit manifestos in Left/Right mirror-image pairs.
    pub mirrored: bool,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            manifestos: 200,
            countries: 5,
            min_statements: 100,
            max_statements: 200,
            start_year: 2010,
            end_year: 2021,
            left_share: 0.25,
            right_share: 0.2,
            spread: 0.15,
            signal: 0.3,
            mirrored: false,
            seed: 42,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.manifestos == 0 || self.countries == 0 {
            return bad("manifestos and countries must be positive".into());
        }
        if self.mirrored && !self.manifestos.is_multiple_of(2) {
            return bad(format!("mirrored corpora need an even manifesto count, got {}", self.manifestos));
        }
        if self.min_statements == 0 || self.min_statements > self.max_statements {
            return bad(format!(
                "statement range {}..={} is empty or starts at zero",
                self.min_statements, self.max_statements
            ));
        }
        if self.start_year > self.end_year {
            return bad(format!("year range {}..={} is empty", self.start_year, self.end_year));
        }
        YearMonth::new(self.start_year, 1)?;
        YearMonth::new(self.end_year, 1)?;
        let shares_ok = self.spread >= 0.0
            && self.left_share >= self.spread
            && self.right_share >= self.spread
            && self.left_share + self.right_share <= 1.0;
        if !shares_ok {
            return bad(format!(
                "shares left={} right={} spread={} do not give valid probabilities",
                self.left_share, self.right_share, self.spread
            ));
        }
        if !(0.0..=1.0).contains(&self.signal) {
            return bad(format!("signal must be in [0, 1], got {}", self.signal));
        }
        Ok(())
    }
}

/// Parses `key=value` pairs separated by commas; unspecified keys keep
/// their defaults.
impl FromStr for SyntheticConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut map = serde_json::Map::new();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {pair:?}")))?;
            let value = match v.trim() {
                "true" => serde_json::Value::Bool(true),
                "false" => serde_json::Value::Bool(false),
                num => serde_json::from_str::<serde_json::Number>(num)
                    .map(serde_json::Value::Number)
                    .map_err(|_| Error::invalid(format!("{k}: {num:?} is not a number")))?,
            };
            map.insert(k.trim().to_owned(), value);
        }
        let cfg: SyntheticConfig = serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| Error::invalid(format!("synthetic corpus spec: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

struct Draft {
    class: RileClass,
    code: usize,
    words: Vec<(bool, usize)>,
}

fn other_codes() -> Vec<&'static str> {
    registry::CATEGORIES
        .iter()
        .filter(|c| match c.kind {
            CategoryKind::Residual => true,
            CategoryKind::Major => !RILE_LEFT.contains(&c.code) && !RILE_RIGHT.contains(&c.code),
            _ => false,
        })
        .map(|c| c.code)
        .collect()
}

fn render(drafts: &[Draft], mirror: bool, manifesto_id: &str, others: &[&str]) -> Result<Vec<Statement>> {
    drafts
        .iter()
        .enumerate()
        .map(|(pos, d)| {
            let class = if mirror { d.class.mirrored() } else { d.class };
            let (code, prefix) = match class {
                RileClass::Right => (RILE_RIGHT[d.code % RILE_RIGHT.len()], "r"),
                RileClass::Left => (RILE_LEFT[d.code % RILE_LEFT.len()], "l"),
                RileClass::Other => (others[d.code % others.len()], "o"),
            };
            let text = d
                .words
                .iter()
                .map(|&(topical, k)| if topical { format!("{prefix}{k}") } else { format!("w{k}") })
                .collect::<Vec<_>>()
                .join(" ");
            Ok(Statement {
                id: format!("{manifesto_id}-{pos:04}"),
                text,
                code: CategoryCode::normalize(code)?,
                manifesto_id: manifesto_id.to_owned(),
                position: pos,
            })
        })
        .collect()
}

/// Generates a labelled corpus with known latent positions.
///
/// Countries are named `C00`, `C01`, ... with one language each and receive
/// manifestos round-robin. With `mirrored`, manifesto `2k + 1` is the mirror
/// image of `2k`: same texts with Left and Right vocabulary and codes
/// swapped, so the gold RILE distribution is exactly symmetric.
pub fn synthetic_corpus(cfg: &SyntheticConfig) -> Result<Corpus> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let others = other_codes();
    let bases = if cfg.mirrored { cfg.manifestos / 2 } else { cfg.manifestos };
    let mut manifestos = Vec::with_capacity(cfg.manifestos);
    for b in 0..bases {
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let p_left = cfg.left_share - cfg.spread * u;
        let p_right = cfg.right_share + cfg.spread * u;
        let n = rng.gen_range(cfg.min_statements..=cfg.max_statements);
        let drafts: Vec<Draft> = (0..n)
            .map(|_| {
                let x: f64 = rng.gen();
                let class = if x < p_left {
                    RileClass::Left
                } else if x < p_left + p_right {
                    RileClass::Right
                } else {
                    RileClass::Other
                };
                let len = rng.gen_range(5..=14);
                let words = (0..len)
                    .map(|_| {
                        if rng.gen_bool(cfg.signal) {
                            (true, rng.gen_range(0..CLASS_WORDS))
                        } else {
                            (false, rng.gen_range(0..COMMON_WORDS))
                        }
                    })
                    .collect();
                Draft {
                    class,
                    code: rng.gen_range(0..usize::MAX / 2),
                    words,
                }
            })
            .collect();
        let year = rng.gen_range(cfg.start_year..=cfg.end_year);
        let month = rng.gen_range(1..=12);
        let copies: &[bool] = if cfg.mirrored { &[false, true] } else { &[false] };
        for &mirror in copies {
            let idx = manifestos.len();
            let country = if cfg.mirrored { b } else { idx } % cfg.countries;
            let id = format!("syn{idx:05}");
            manifestos.push(Manifesto {
                statements: render(&drafts, mirror, &id, &others)?,
                id,
                party: format!("party{:03}{}", b, if mirror { "m" } else { "" }),
                country: format!("C{country:02}"),
                language: format!("l{country:02}"),
                date: YearMonth::new(year, month)?,
            });
        }
    }
    Corpus::from_manifestos(manifestos, format!("synthetic:seed={}", cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scales::{manifesto_rile, LabelSource};

    #[test]
    fn defaults_meet_size_constraints() {
        let c = synthetic_corpus(&SyntheticConfig::default()).unwrap();
        assert_eq!(c.len(), 200);
        assert_eq!(c.countries().len(), 5);
        assert!(c.manifestos().all(|m| (100..=200).contains(&m.statements.len())));
        assert_eq!(c, synthetic_corpus(&SyntheticConfig::default()).unwrap());
    }

    #[test]
    fn mirrored_pairs_negate() {
        let cfg = SyntheticConfig {
            manifestos: 20,
            mirrored: true,
            ..SyntheticConfig::default()
        };
        let c = synthetic_corpus(&cfg).unwrap();
        let scores: Vec<f64> = c
            .manifestos()
            .map(|m| manifesto_rile::<f64>(m, LabelSource::Gold).unwrap().value())
            .collect();
        for pair in scores.chunks(2) {
            assert_eq!(pair[0], -pair[1]);
        }
        assert!(synthetic_corpus(&SyntheticConfig { manifestos: 3, ..cfg }).is_err());
    }

    #[test]
    fn parses_key_value_spec() {
        let cfg: SyntheticConfig = "manifestos=10, seed=7,mirrored=true,spread=0.1".parse().unwrap();
        assert_eq!(cfg.manifestos, 10);
        assert_eq!(cfg.seed, 7);
        assert!(cfg.mirrored);
        assert_eq!(cfg.spread, 0.1);
        assert_eq!(cfg.countries, 5);
        assert!("".parse::<SyntheticConfig>().is_ok());
        assert!("bogus=1".parse::<SyntheticConfig>().is_err());
        assert!("manifestos".parse::<SyntheticConfig>().is_err());
        assert!("manifestos=abc".parse::<SyntheticConfig>().is_err());
        assert!("left_share=0.1,spread=0.2".parse::<SyntheticConfig>().is_err());
    }
}
