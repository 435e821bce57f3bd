//! Query texts shared by the parser tests.

pub const TRANSFERS_QUERY: &str =
    "MATCH (:Person{name:'Hatfield'})-[:own]->(C)-[:transfer{amount:m,\"timestamp\":d}]->(X)<-[:own]-(:person{name:r})";
pub const TRANSFERS_REUSED_ALIAS: &str =
    "MATCH (:Person{name:'Hatfield'})-[:own]->(C)-[:transfer{amount:m,\"timestamp\":d}]->(C)<-[:own]-(:person{name:r})";

pub const COMPLEX_READ: &str = r#"MATCH
truncating Transfer
  ("timestamp" desc)=10
trail p=(m:Medium{isBlocked:true})
-[:signIn where "timestamp">timestamp'2022-01-01' and
  "timestamp"<timestamp'2022-12-31']->
  (:Account{id:otherId})
  [()-[:x:transfer
where "timestamp" >timestamp'2022-01-01' and "timestamp" <timestamp'2022-12-31'
and later(p.x,"timestamp")]->()]{1,3}
  (:Account{id:4884435270860017215})
return
  otherId,
  (cardinality(p)-3)/2 as accountDistance,
  m.id as mediumId,
  m.type as mediumType
order by (accountDistance,otherId,mediumId)"#;

/// One statement per grammar rule, each exercising it at least once.
pub const CORPUS: &[&str] = &[
    // MatchStatement without a dependent statement
    "MATCH (x)",
    // several comma-separated matches, statement WHERE
    "MATCH (a), (b) WHERE a.id = b.id",
    // truncation: named, unnamed, with and without order, several specs
    "MATCH TRUNCATING transfer(\"timestamp\" DESC)=10 (a)-[:transfer]->(b)",
    "MATCH TRUNCATING =5 (a)-[]->(b)",
    "MATCH TRUNCATING own=1, transfer(amount ASC, \"timestamp\" DESC)=3, (w)=2 (a)-[]->(b)",
    // match modes
    "MATCH TRAIL (a)-[]->(b)",
    "MATCH ACYCLIC ALL (a)-[]->(b)",
    "MATCH SIMPLE ANY (a)-[]->(b)",
    "MATCH SHORTEST (a)-[]->(b)",
    // path identifier
    "MATCH p=(a)-[e]->(b) RETURN cardinality(p)",
    // node items: alias, label, property map, where
    "MATCH (a:Account{id:1, isBlocked:FALSE} WHERE a.id > 0)",
    "MATCH (:Account)",
    "MATCH ({id:1})",
    "MATCH (WHERE TRUE)",
    // edge directions and items
    "MATCH (a)<-[e:own{since:2020} WHERE e.since < 2030]-(b)",
    "MATCH (a)-[:x:transfer]->(b)",
    // quantified path patterns
    "MATCH (a)[()-[]->()]?(b)",
    "MATCH (a)[()-[]->()]*(b)",
    "MATCH (a)[()-[]->()]+(b)",
    "MATCH (a)[()-[]->()]{2}(b)",
    "MATCH (a)[()-[]->()]{1,3}(b)",
    "MATCH (a)[()-[]->()]{2,}(b)",
    "MATCH (a)[TRAIL ()-[]->()[()<-[]-()]{0,2}()]+(b)",
    // dependent statements
    "MATCH (a:Account{id:1}), (b:Account{id:2}) CREATE (a)-[:transfer{amount:1.5}]->(b)",
    "MATCH (a) RETURN a.id AS id, count(*) ORDER BY id DESC, a",
    "MATCH (a) RETURN a ORDER BY (a.x, a.y) DESC",
    // CREATE statement
    "CREATE (h:Person{name:'Hatfield'})-[:own]->(:Account{id:1}), (h)-[:own]->(:Account{id:2})",
    "CREATE (a)<-[:own]-(b)",
    // expressions
    "MATCH (a) WHERE NOT a.x = 1 OR a.y <> 2 AND a.z <= 3 AND a.w >= 4",
    "MATCH (a) RETURN - a.x + 2 * 3 / (4 - 1), p[cardinality(p) - 1].amount",
    "MATCH (a) RETURN TIMESTAMP '2022-10-07 04:35:24', timestamp'2022-01-01', 'it''s', 12.50, TRUE",
    "MATCH (a) RETURN \"select\".\"timestamp\", f(), g(1, 2)",
    // comments
    "MATCH (a) -- trailing comment\nRETURN a",
];
