fn step(count: &mut u8, flag: &mut bool) {
    *count = count.wrapping_add(10);
    *flag = false;
}

#[kani::proof]
fn check_step() {
    let mut count: u8 = kani::any();
    let mut flag: bool = kani::any();
    let old_count = count;
    kani::assume(true);
    step(&mut count, &mut flag);
    assert!(((count == (old_count.wrapping_add(10u8))) && (!flag)));
}
