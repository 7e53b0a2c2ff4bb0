// A whole-condition pattern: a disjunction being zero forces both inputs
// to zero.
int main() {
  int a;
  int b;
  a = __VERIFIER_nondet_int();
  b = __VERIFIER_nondet_int();
  a = a & 1;
  b = b & 1;
  assume((a | b) == 0);
  assert(a == 0);
  assert(b == 0);
  return 0;
}
