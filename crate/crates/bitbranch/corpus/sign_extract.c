// Classic sign extraction: arithmetic shift by width-1 yields 0 or -1.
int main() {
  int v;
  int sign;
  v = __VERIFIER_nondet_int();
  sign = v >> 31;
  if (v >= 0) {
    assert(sign == 0);
  } else {
    assert(sign == 0 - 1);
  }
  return 0;
}
