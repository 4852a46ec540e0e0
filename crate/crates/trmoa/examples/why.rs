use trmoa::gen::{generate_instance, GeneratorParams};
fn main() {
    let p = GeneratorParams {
        alpha: 0.9, beta: 0.3, user_count: 30, board_count: 3,
        tag_universe: 6, tag_count_range: (2, 5),
        t1: 0, t2: 3_600, slot_duration: 900, seed: 0,
        ..GeneratorParams::default()
    };
    println!("{:?}", generate_instance(&p).err());
}
