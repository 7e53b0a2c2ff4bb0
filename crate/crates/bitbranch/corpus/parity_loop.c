// Parity via the low bit of a shrinking counter.
int main() {
  int n;
  int parity;
  int bit;
  n = *;
  n = n % 256;
  if (n < 0) {
    n = n + 256;
  }
  parity = 0;
  while (n > 0) {
    bit = n & 1;
    parity = parity ^ bit;
    n = n / 2;
  }
  assert(parity == 0 || parity == 1);
  return 0;
}
