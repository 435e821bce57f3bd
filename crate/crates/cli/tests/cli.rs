mod support;

use std::collections::BTreeMap;
use std::fs;
use std::io::Cursor;
use std::path::Path;
use std::process::Command;

use gqlengine::{Store, TypeRef};
use gqlengine_cli::generate::{generate, GeneratorConfig};
use gqlengine_cli::{export_bundle, load_bundle, BundleError, Format, Session, SessionConfig};
use support::fixture;

fn gqlsh(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gqlsh")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Nodes and edges described without internal ids, counted as multisets.
fn shape(store: &Store) -> (BTreeMap<String, usize>, BTreeMap<String, usize>) {
    let node_sig = |id| {
        let n = store.node(id).unwrap();
        format!("{}{:?}", store.type_name(TypeRef::Node(n.node_type)), n.properties)
    };
    let mut nodes = BTreeMap::new();
    for n in store.nodes() {
        *nodes.entry(node_sig(n.id)).or_default() += 1;
    }
    let mut edges = BTreeMap::new();
    for e in store.edges() {
        let sig = format!(
            "{} -[{}{:?}]-> {}",
            node_sig(e.source),
            store.type_name(TypeRef::Edge(e.edge_type)),
            e.properties,
            node_sig(e.dest)
        );
        *edges.entry(sig).or_default() += 1;
    }
    (nodes, edges)
}

fn supertypes(store: &Store) -> Vec<(String, Option<String>)> {
    let mut v: Vec<_> = store
        .node_types()
        .map(|(_, t)| (t.name.clone(), t.supertype.map(|p| store.node_type(p).name.clone())))
        .chain(
            store
                .edge_types()
                .map(|(_, t)| (t.name.clone(), t.supertype.map(|p| store.edge_type(p).name.clone()))),
        )
        .collect();
    v.sort();
    v
}

#[test]
fn bundles_survive_export() {
    for name in ["finbench-transfers", "finbench-mini"] {
        let a = load_bundle(&fixture(name)).unwrap().store;
        let dir = tempfile::tempdir().unwrap();
        export_bundle(&a, dir.path()).unwrap();
        let b = load_bundle(dir.path()).unwrap().store;
        assert_eq!(shape(&a), shape(&b), "{name}");
        assert_eq!(supertypes(&a), supertypes(&b), "{name}");
        b.check_integrity().unwrap();
    }
}

#[test]
fn supertypes_survive_export() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "Account.nodes.csv", "id\n1\n2\n");
    write(dir.path(), "transfer.edges.csv", "src,dst\n1,2\n");
    write(dir.path(), "wire.edges.csv", "src,dst,fee:decimal\n2,1,0.50\n");
    write(dir.path(), "schema.txt", "wire < transfer\n");
    let a = load_bundle(dir.path()).unwrap().store;
    let out = tempfile::tempdir().unwrap();
    export_bundle(&a, out.path()).unwrap();
    let b = load_bundle(out.path()).unwrap().store;
    assert_eq!(supertypes(&a), supertypes(&b));
    assert_eq!(shape(&a), shape(&b));
}

#[test]
fn mini_fixture_is_the_seed_one_generator_output() {
    let dir = tempfile::tempdir().unwrap();
    export_bundle(&generate(&GeneratorConfig::mini(1)), dir.path()).unwrap();
    for entry in fs::read_dir(fixture("finbench-mini")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap();
        assert_eq!(
            fs::read(&path).unwrap(),
            fs::read(dir.path().join(name)).unwrap(),
            "{}",
            path.display()
        );
    }
}

#[test]
fn mini_fixture_has_the_intended_size() {
    let store = load_bundle(&fixture("finbench-mini")).unwrap().store;
    let count = |t: &str| {
        store
            .edges()
            .filter(|e| store.edge_type(e.edge_type).name == t)
            .count()
    };
    assert_eq!(count("transfer"), 2000);
    assert_eq!(store.node_count(), 290);
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn small_bundle_loads() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "Person.nodes.csv", "id,name:text\n1,Ann\n2,Bo\n");
    write(dir.path(), "Account.nodes.csv", "_id,id:int\na1,100\n");
    write(dir.path(), "own.edges.csv", "src,dst:Account\n1,a1\n");
    let b = load_bundle(dir.path()).unwrap();
    assert_eq!(b.store.node_count(), 3);
    assert_eq!(b.store.edge_count(), 1);
    assert!(b.node("Account", "a1").is_some());
}

#[test]
fn load_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "Person.nodes.csv", "id,name:text\n1,Ann\n2,Bo\n");
    write(dir.path(), "own.edges.csv", "src,dst\n1,2\n2,7\n");
    let err = load_bundle(dir.path()).unwrap_err();
    assert!(matches!(&err, BundleError::DanglingEdge { file, line: 3, id, .. } if file == "own.edges.csv" && id == "7"), "{err}");

    write(dir.path(), "own.edges.csv", "src,dst\n1,2\n");
    write(dir.path(), "Person.nodes.csv", "id,age:number\n1,3\n");
    assert!(matches!(load_bundle(dir.path()).unwrap_err(), BundleError::BadKind { .. }));
    write(dir.path(), "Person.nodes.csv", "id,age\n1,3\n");
    assert!(matches!(load_bundle(dir.path()).unwrap_err(), BundleError::MalformedHeader { .. }));
    write(dir.path(), "Person.nodes.csv", "id,age:int\n1,x\n2,4\n");
    assert!(matches!(load_bundle(dir.path()).unwrap_err(), BundleError::BadValue { line: 2, .. }));
    write(dir.path(), "Person.nodes.csv", "id\n1\n1\n");
    assert!(matches!(load_bundle(dir.path()).unwrap_err(), BundleError::DuplicateId { .. }));
    write(dir.path(), "Person.nodes.csv", "id\n1\n2\n");
    write(dir.path(), "Pet.nodes.csv", "id\n1\n");
    assert!(matches!(load_bundle(dir.path()).unwrap_err(), BundleError::AmbiguousId { .. }));
}

#[test]
fn transfers_script_prints_four_rows() {
    let script = fixture("scripts/transfers.gql");
    let graph = fixture("finbench-transfers");
    let (code, out, err) = gqlsh(&["run", script.to_str().unwrap(), "--graph", graph.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "M           D                    R");
    assert_eq!(lines.len(), 5);
    for (line, amount) in lines[1..].iter().zip(["2977613.82", "6888877.75", "989617.6", "4024112.15"]) {
        assert!(line.starts_with(amount), "{line}");
    }
    assert!(lines[1].contains("07/10/2022 04:35:24"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gql");
    fs::write(&bad, "CREATE (:A{id:1});\nMATCH (a:A RETURN a;\nCREATE (:A{id:2})").unwrap();
    let (code, out, err) = gqlsh(&["run", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("created 1 node(s)"), "{out}");
    assert_eq!(err.matches("line 2, column 12").count(), 1, "{err}");
    assert!(!out.contains("CREATE") && out.matches("created").count() == 1, "{out}");

    let (code, _, err) = gqlsh(&["run", bad.to_str().unwrap(), "--graph", "/nonexistent/bundle"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = gqlsh(&["run", "/nonexistent/script.gql"]);
    assert_eq!(code, 2);
    let (code, _, _) = gqlsh(&["frobnicate"]);
    assert_eq!(code, 2);

    let script = fixture("scripts/complex-read.gql");
    let (code, _, err) = gqlsh(&["run", script.to_str().unwrap(), "--param", "id1=1"]);
    assert_eq!(code, 1);
    assert!(err.contains("$endTime") && err.contains("$truncationLimit"), "{err}");
}

#[test]
fn parameters_and_stats() {
    let script = fixture("scripts/complex-read.gql");
    let graph = fixture("finbench-mini");
    let args = [
        "run",
        script.to_str().unwrap(),
        "--graph",
        graph.to_str().unwrap(),
        "--param",
        "truncationOrder=DESC",
        "--param",
        "truncationLimit=10",
        "--param",
        "startTime=timestamp'2022-01-01'",
        "--param",
        "endTime=timestamp'2022-12-31'",
        "--param",
        "id1=6464550890953539063",
        "--stats",
        "--format",
        "tsv",
    ];
    let (code, first, err) = gqlsh(&args);
    assert_eq!(code, 0, "{err}");
    assert!(first.starts_with("OTHERID\taccountDistance\tmediumId\tmediumType\n"), "{first}");
    assert!(first.lines().last().unwrap().starts_with("-- edges examined: "), "{first}");
    let (_, second, _) = gqlsh(&args);
    assert_eq!(first, second);
}

#[test]
fn repl_create_then_match() {
    let mut session = Session::open(SessionConfig {
        format: Format::Tsv,
        ..Default::default()
    })
    .unwrap();
    let input = "CREATE (:Person{name:'Hatfield', born:1970});\n\nMATCH (p:Person)\nRETURN p.name, p.born;\nMATCH (q:Nope RETURN q;\nMATCH (p:Person) RETURN count(*)\n";
    let (mut out, mut err) = (Vec::new(), Vec::new());
    session.repl(&mut Cursor::new(input), &mut out, &mut err, true).unwrap();
    let out = String::from_utf8(out).unwrap();
    let err = String::from_utf8(err).unwrap();
    assert!(out.contains("SQL> created 1 node(s), 0 edge(s), 1 type(s)"), "{out}");
    assert!(out.contains("p.name\tp.born\nHatfield\t1970\n"), "{out}");
    assert!(out.contains("count(*)\n1\n"), "{out}");
    assert!(err.starts_with("error: line 1, column"), "{err}");
}

#[test]
fn generate_and_export_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = gqlsh(&["generate", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    for name in ["transfer.edges.csv", "Account.nodes.csv"] {
        assert_eq!(
            fs::read(dir.path().join(name)).unwrap(),
            fs::read(fixture("finbench-mini").join(name)).unwrap()
        );
    }
    let again = tempfile::tempdir().unwrap();
    let (code, _, err) = gqlsh(&[
        "export",
        "--graph",
        dir.path().to_str().unwrap(),
        "--out",
        again.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let a = load_bundle(dir.path()).unwrap().store;
    let b = load_bundle(again.path()).unwrap().store;
    assert_eq!(shape(&a), shape(&b));
}
