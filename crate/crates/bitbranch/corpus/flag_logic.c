// Boolean flags encoded as 0/1 integers combined with bitwise operators.
int main() {
  int p;
  int q;
  int both;
  int either;
  int differ;
  p = __VERIFIER_nondet_int();
  q = __VERIFIER_nondet_int();
  p = p & 1;
  q = q & 1;
  both = p & q;
  either = p | q;
  differ = p ^ q;
  assert(both <= either);
  assert(differ <= either);
  assert(both + differ == either);
  return 0;
}
