// Bitwise expression inside a loop condition, re-evaluated per iteration.
int main() {
  int x;
  int m;
  int steps;
  x = *;
  x = x % 64;
  if (x < 0) {
    x = x + 64;
  }
  m = 31;
  steps = 0;
  while ((x & m) > 0) {
    x = x - 1;
    steps = steps + 1;
  }
  assert(steps <= 64);
  return 0;
}
