use rmisog::matz::*;

fn main() {
    let a: Vec<Vec<i128>> = vec![
        vec![-15, 1, 14, 7, 1],
        vec![10, 7, 16, -15, 9],
        vec![-14, -20, -18, -17, 2],
        vec![1, 2, 5, 17, 1],
        vec![17, -5, -14, 8, -17],
        vec![-18, 13, 20, 5, 6],
        vec![5, -7, 4, -7, 9],
        vec![1, -3, -13, 18, 9],
    ];
    let s = smith(&a);
    println!("diag {:?}", s.diag);
}
