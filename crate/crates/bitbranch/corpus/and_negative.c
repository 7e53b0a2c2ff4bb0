// Conjunction of two negative values stays negative and below both.
int main() {
  int p;
  int q;
  int r;
  p = *;
  q = *;
  p = p % 32;
  if (p >= 0) {
    p = p - 32;
  }
  q = q % 32;
  if (q >= 0) {
    q = q - 32;
  }
  r = p & q;
  assert(r < 0);
  assert(r <= p);
  assert(r <= q);
  return 0;
}
