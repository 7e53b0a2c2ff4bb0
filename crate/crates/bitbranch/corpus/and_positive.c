// Conjunction of two bounded non-negative inputs; the result bounds both.
int main() {
  int p;
  int q;
  int r;
  p = *;
  q = *;
  p = p % 64;
  if (p < 0) {
    p = p + 64;
  }
  q = q % 64;
  if (q < 0) {
    q = q + 64;
  }
  r = p & q;
  assert(r <= p);
  assert(r <= q);
  assert(r >= 0);
  return 0;
}
