//! The eight intermediate sign patterns of the worked 11×11 example: first
//! line the index labels, then one labelled row per index.

pub const STAGES: &[(&str, &str)] = &[
    (
        "B[1,0]",
        "\
         v1 v2 v3
         v1 + - 0
         v2 0 + -
         v3 - 0 +",
    ),
    (
        "B[1,0],1",
        "\
         1 2 3 v2 v3
         1 0 + 0 - 0
         2 0 0 + 0 0
         3 + + 0 0 0
         v2 0 0 0 + -
         v3 0 - 0 0 +",
    ),
    (
        "B[1,0],2",
        "\
         1 2 3 4 v2 v3
         1 0 + 0 0 - 0
         2 0 0 + 0 0 0
         3 + 0 0 + 0 0
         4 0 + 0 0 0 0
         v2 0 0 0 0 + -
         v3 0 0 0 - 0 +",
    ),
    (
        "B[1,1],1",
        "\
         1 2 3 4 5 6 7 v3
         1 0 + 0 0 0 0 - 0
         2 0 0 + 0 0 0 0 0
         3 + 0 0 + 0 0 0 0
         4 0 + 0 0 0 0 0 0
         5 0 0 0 0 0 + + -
         6 0 0 0 0 0 0 + 0
         7 0 0 0 0 + 0 0 0
         v3 0 0 0 - 0 0 0 +",
    ),
    (
        "B[1,1],2",
        "\
         1 2 3 4 5 6 7 8 v3
         1 0 + 0 0 0 0 - 0 0
         2 0 0 + 0 0 0 0 0 0
         3 + 0 0 + 0 0 0 0 0
         4 0 + 0 0 0 0 0 0 0
         5 0 0 0 0 0 + 0 + -
         6 0 0 0 0 0 0 + 0 0
         7 0 0 0 0 + 0 0 0 0
         8 0 0 0 0 0 0 + 0 0
         v3 0 0 0 - 0 0 0 0 +",
    ),
    (
        "B[1,3]",
        "\
         1 2 3 4 5 6 7 8 9' 9''
         1 0 + 0 0 0 0 - 0 0 0
         2 0 0 + 0 0 0 0 0 0 0
         3 + 0 0 + 0 0 0 0 0 0
         4 0 + 0 0 0 0 0 0 0 0
         5 0 0 0 0 0 + 0 + - 0
         6 0 0 0 0 0 0 + 0 0 0
         7 0 0 0 0 + 0 0 0 0 0
         8 0 0 0 0 0 0 + 0 0 0
         9' 0 0 0 0 0 0 0 0 0 +
         9'' 0 0 0 - 0 0 0 0 + 0",
    ),
    (
        "B[2,0]",
        "\
         1 2 3 4 5 6 7 8 9' 9'' v4
         1 0 + 0 0 0 0 - 0 0 0 0
         2 0 0 + 0 0 0 0 0 0 0 0
         3 + 0 0 + 0 0 0 0 0 0 0
         4 0 + 0 0 0 0 0 0 0 0 0
         5 0 0 0 0 0 + 0 + - 0 -
         6 0 0 0 0 0 0 + 0 0 0 0
         7 0 0 0 0 + 0 0 0 0 0 0
         8 0 0 0 0 0 0 + 0 0 0 0
         9' 0 0 0 0 0 0 0 0 0 + 0
         9'' 0 0 0 - 0 0 0 0 + 0 0
         v4 0 0 0 - 0 0 0 0 0 0 +",
    ),
    (
        "B[2,1]",
        "\
         1 2 3 4 5 6 7 8 9' 9'' 10 11
         1 0 + 0 0 0 0 - 0 0 0 0 0
         2 0 0 + 0 0 0 0 0 0 0 0 0
         3 + 0 0 + 0 0 0 0 0 0 0 0
         4 0 + 0 0 0 0 0 0 0 0 0 0
         5 0 0 0 0 0 + 0 + - 0 0 -
         6 0 0 0 0 0 0 + 0 0 0 0 0
         7 0 0 0 0 + 0 0 0 0 0 0 0
         8 0 0 0 0 0 0 + 0 0 0 0 0
         9' 0 0 0 0 0 0 0 0 0 + 0 0
         9'' 0 0 0 - 0 0 0 0 + 0 0 0
         10 0 0 0 - 0 0 0 0 0 0 0 +
         11 0 0 0 0 0 0 0 0 0 0 + 0",
    ),
];

/// `(labels, rows)` of a stage block.
pub fn parse(block: &str) -> (Vec<String>, Vec<Vec<char>>) {
    let mut lines = block.lines().map(str::split_whitespace);
    let labels: Vec<String> = lines.next().unwrap().map(String::from).collect();
    let rows = lines
        .map(|mut l| {
            let _label = l.next();
            l.map(|c| c.chars().next().unwrap()).collect()
        })
        .collect();
    (labels, rows)
}
