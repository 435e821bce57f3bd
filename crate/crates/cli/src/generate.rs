//! Seeded synthetic financial graphs in the shape of the benchmark data:
//! persons own accounts, media sign in to accounts, and accounts transfer
//! money to each other with a heavy-tailed out-degree.

use chrono::{Duration, NaiveDate, NaiveDateTime};
use gqlengine::{ElementId, Properties, Store, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use rust_decimal::Decimal;

#[derive(Clone, Copy, Debug)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub persons: usize,
    pub accounts: usize,
    pub media: usize,
    pub transfers: usize,
}

impl GeneratorConfig {
    /// The size of the bundled `finbench-mini` fixture.
    pub fn mini(seed: u64) -> Self {
        GeneratorConfig {
            seed,
            persons: 60,
            accounts: 200,
            media: 30,
            transfers: 2000,
        }
    }
}

const SURNAMES: [&str; 12] = [
    "Alvarez", "Brennan", "Chaudhry", "Dimitrov", "Eriksen", "Fontaine", "Gallo", "Haddad", "Ivanova", "Jensen",
    "Kowalski", "Lindqvist",
];
const MEDIUM_TYPES: [&str; 4] = ["phone", "pad", "laptop", "watch"];

fn start() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2021, 6, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid date")
}

/// Two years of second-resolution timestamps, straddling calendar 2022.
fn timestamp(rng: &mut ChaCha8Rng) -> Value {
    let secs = rng.random_range(0..(730 * 24 * 3600i64));
    Value::Timestamp(start() + Duration::seconds(secs))
}

pub fn generate(config: &GeneratorConfig) -> Store {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut store = Store::new();
    for t in ["Person", "Account", "Medium"] {
        store.define_node_type(t, None).expect("fresh type");
    }
    store.define_edge_type("own", "Person", "Account", None).expect("fresh type");
    store.define_edge_type("signIn", "Medium", "Account", None).expect("fresh type");
    store.define_edge_type("transfer", "Account", "Account", None).expect("fresh type");

    let mut persons = Vec::with_capacity(config.persons);
    for i in 0..config.persons {
        let mut p = Properties::new();
        p.insert("id".into(), Value::Int(i as i64 + 1));
        p.insert(
            "name".into(),
            Value::text(format!("{} {}", SURNAMES[i % SURNAMES.len()], i / SURNAMES.len() + 1)),
        );
        persons.push(store.insert_node("Person", p).expect("type exists"));
    }

    let mut accounts: Vec<ElementId> = Vec::with_capacity(config.accounts);
    let mut used_ids = std::collections::BTreeSet::new();
    for _ in 0..config.accounts {
        let id = loop {
            let id: i64 = rng.random_range(10i64.pow(17)..i64::MAX);
            if used_ids.insert(id) {
                break id;
            }
        };
        let mut p = Properties::new();
        p.insert("id".into(), Value::Int(id));
        p.insert("isBlocked".into(), Value::Bool(rng.random_bool(0.05)));
        accounts.push(store.insert_node("Account", p).expect("type exists"));
    }

    let mut media = Vec::with_capacity(config.media);
    for i in 0..config.media {
        let mut p = Properties::new();
        p.insert("id".into(), Value::Int(i as i64 + 1));
        p.insert("type".into(), Value::text(MEDIUM_TYPES[rng.random_range(0..MEDIUM_TYPES.len())]));
        p.insert("isBlocked".into(), Value::Bool(rng.random_bool(0.3)));
        media.push(store.insert_node("Medium", p).expect("type exists"));
    }

    for (i, &a) in accounts.iter().enumerate() {
        let owner = if i < persons.len() {
            persons[i]
        } else {
            persons[rng.random_range(0..persons.len())]
        };
        store.insert_edge("own", owner, a, Properties::new()).expect("live nodes");
    }

    for &m in &media {
        for _ in 0..rng.random_range(1..=4) {
            let a = accounts[rng.random_range(0..accounts.len())];
            let mut p = Properties::new();
            p.insert("timestamp".into(), timestamp(&mut rng));
            store.insert_edge("signIn", m, a, p).expect("live nodes");
        }
    }

    // source rank drawn from a Zipf law gives a power-law out-degree
    let zipf = Zipf::new(accounts.len() as f64, 1.1).expect("valid parameters");
    for _ in 0..config.transfers {
        let rank = zipf.sample(&mut rng) as usize;
        let src = accounts[rank.clamp(1, accounts.len()) - 1];
        let dst = loop {
            let d = accounts[rng.random_range(0..accounts.len())];
            if d != src {
                break d;
            }
        };
        let mut p = Properties::new();
        p.insert("timestamp".into(), timestamp(&mut rng));
        p.insert(
            "amount".into(),
            Value::Decimal(Decimal::new(rng.random_range(100..1_000_000_000i64), 2)),
        );
        store.insert_edge("transfer", src, dst, p).expect("live nodes");
    }
    store
}
