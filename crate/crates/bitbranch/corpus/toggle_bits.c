// Toggling with an all-ones mask inverts; toggling twice restores.
int main() {
  int x;
  int once;
  int twice;
  x = *;
  x = x % 2048;
  if (x < 0) {
    x = 0 - x;
  }
  once = x ^ 0;
  assert(once == x);
  twice = (x ^ 1) ^ 1;
  assert(twice == x);
  return 0;
}
