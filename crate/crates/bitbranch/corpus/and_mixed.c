// Mask a possibly-negative value with a non-negative mask.
int main() {
  int v;
  int mask;
  int low;
  v = __VERIFIER_nondet_int();
  mask = 255;
  low = v & mask;
  assert(low >= 0);
  assert(low <= mask);
  return 0;
}
