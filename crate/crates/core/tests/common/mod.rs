#![allow(dead_code)]

use scale_bench::{CategoryCode, Corpus, Manifesto, Statement, YearMonth};

pub fn manifesto(id: &str, country: &str, year: u16, codes: &[&str]) -> Manifesto {
    Manifesto {
        id: id.to_owned(),
        party: format!("party-{id}"),
        country: country.to_owned(),
        language: format!("lang-{country}"),
        date: YearMonth::new(year, 6).unwrap(),
        statements: codes
            .iter()
            .enumerate()
            .map(|(i, c)| Statement {
                id: format!("{id}-{i}"),
                text: format!("statement {i} of {id}"),
                code: CategoryCode::normalize(c).unwrap(),
                manifesto_id: id.to_owned(),
                position: i,
            })
            .collect(),
    }
}

pub fn corpus(manifestos: Vec<Manifesto>) -> Corpus {
    Corpus::from_manifestos(manifestos, "fixture").unwrap()
}
