// bitbranch: bitwise branching transformer
// prelude: assume(int), assert(int), int __VERIFIER_nondet_int(void)
// rules fired: W-And-Pos x1, W-And-Neg x1, W-And-Mix x1, W-And-Mix@1 x1
int main() {
  int a;
  int x;
  int __bwb_s0;
  a = __VERIFIER_nondet_int();
  assume(a > 0);
  while (x > 0) {
    a = a - 1;
    __bwb_s0 = x;
    // bwb: W-And-Pos
    // bwb: W-And-Neg
    // bwb: W-And-Mix
    // bwb: W-And-Mix@1
    if (x >= 0 && a >= 0) {
      x = __VERIFIER_nondet_int();
      assume(x <= __bwb_s0 && x <= a);
    } else if (x < 0 && a < 0) {
      x = __VERIFIER_nondet_int();
      assume(x <= __bwb_s0 && x <= a && x < 0);
    } else if (x >= 0 && a < 0) {
      x = __VERIFIER_nondet_int();
      assume(0 <= x && x <= __bwb_s0);
    } else if (a >= 0 && x < 0) {
      x = __VERIFIER_nondet_int();
      assume(0 <= x && x <= a);
    } else {
      x = x & a;
    }
  }
  return 0;
}
