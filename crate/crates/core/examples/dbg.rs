fn main() {
    use astro_float::{BigFloat, Sign};
    let x = BigFloat::from_words(&[3], Sign::Pos, 2);
    println!("from_words([3],Pos,2) = {:?}", x);
    let y = BigFloat::from_i64(3, 64);
    println!("from_i64(3) = {:?}", y);
    println!("raw parts x: {:?}", x.as_raw_parts());
    println!("raw parts y: {:?}", y.as_raw_parts());
}
