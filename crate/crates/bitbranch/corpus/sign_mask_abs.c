// Branch-free absolute value with the sign mask: (v ^ m) - m, m = v >> 31.
int main() {
  int v;
  int m;
  int flipped;
  int abs;
  v = __VERIFIER_nondet_int();
  v = v % 100000;
  m = v >> 31;
  flipped = v ^ m;
  abs = flipped - m;
  if (v >= 0) {
    assert(abs == v);
  } else {
    assert(abs == 0 - v);
  }
  return 0;
}
